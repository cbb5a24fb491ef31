#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "encore/data.hpp"
#include "encore/lmm.hpp"
#include "oracles.hpp"

using encore::SimulationSpec;

#ifndef ENCORE_DATA_DIR
#error "ENCORE_DATA_DIR must point at the repository data directory"
#endif

namespace {

std::vector<int> random_labels(int n, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<int> out(n);
  for (auto& v : out) v = pick(rng);
  return out;
}

}  // namespace

TEST_CASE("simulation is deterministic and shaped correctly") {
  const SimulationSpec spec{50, 30, 0.5, 7};
  const auto a = encore::simulate_heritability_data(spec);
  const auto b = encore::simulate_heritability_data(spec);
  CHECK(a.phenotype == b.phenotype);
  CHECK(a.genotypes == b.genotypes);
  CHECK(a.grm.matrix() == b.grm.matrix());
  CHECK(a.phenotype.size() == 50);
  CHECK(a.genotypes.rows() == 50);
  CHECK(a.genotypes.cols() == 30);
  CHECK(a.grm.n_samples() == 50);
}

TEST_CASE("standardized genotypes pin the relatedness trace") {
  // Every non-constant column has sum of squares n - 1, so
  // trace(Z Z' / p) = n - 1 and the mean diagonal is (n - 1) / n.
  const auto sim = encore::simulate_heritability_data({300, 400, 0.5, 11});
  const double mean_diag = sim.grm.matrix().trace() / 300.0;
  CHECK(mean_diag == doctest::Approx(299.0 / 300.0).epsilon(1e-9));
  for (int j = 0; j < 400; ++j) {
    const double col_mean = sim.genotypes.col(j).mean();
    CHECK(std::abs(col_mean) <= 1e-12);
  }
}

TEST_CASE("phenotypes decompose linearly across the signal fraction") {
  // For a fixed seed the genetic and noise draws are shared, so
  // y(h2) = sqrt(h2) * y(1) + sqrt(1 - h2) * y(0) exactly.
  const int n = 80, p = 60;
  const std::uint64_t seed = 19;
  const auto pure_noise = encore::simulate_heritability_data({n, p, 0.0, seed});
  const auto pure_signal = encore::simulate_heritability_data({n, p, 1.0, seed});
  const auto mixed = encore::simulate_heritability_data({n, p, 0.3, seed});
  const Eigen::VectorXd expected = std::sqrt(0.3) * pure_signal.phenotype +
                                   std::sqrt(0.7) * pure_noise.phenotype;
  CHECK((mixed.phenotype - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("simulated variance is calibrated") {
  // Var(y) should hover around 1 regardless of the signal fraction.
  for (const double h2 : {0.0, 0.5, 1.0}) {
    double total = 0.0;
    const int n_seeds = 30;
    for (int s = 0; s < n_seeds; ++s) {
      const auto sim =
          encore::simulate_heritability_data({400, 100, h2, 1000u + s});
      const Eigen::VectorXd y = sim.phenotype;
      const double mean = y.mean();
      total += (y.array() - mean).square().sum() / (y.size() - 1);
    }
    CHECK(total / n_seeds == doctest::Approx(1.0).epsilon(0.1));
  }
}

TEST_CASE("extreme signal fractions are recovered by the fit") {
  const auto low = encore::simulate_heritability_data({500, 200, 0.0, 23});
  const encore::LmmFit fit_low = encore::reml_fit(
      {low.phenotype, Eigen::MatrixXd::Ones(500, 1), low.grm});
  CHECK(fit_low.h2 <= 0.15);

  const auto high = encore::simulate_heritability_data({500, 200, 1.0, 29});
  const encore::LmmFit fit_high = encore::reml_fit(
      {high.phenotype, Eigen::MatrixXd::Ones(500, 1), high.grm});
  CHECK(fit_high.h2 >= 0.85);
}

TEST_CASE("degenerate simulations are rejected or zeroed") {
  CHECK_THROWS_AS(encore::simulate_heritability_data({1, 10, 0.5, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(encore::simulate_heritability_data({10, 0, 0.5, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(encore::simulate_heritability_data({10, 5, 1.5, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(encore::simulate_heritability_data({10, 5, -0.1, 1}),
                  std::invalid_argument);

  // With two samples and one marker, some seed draws a constant column; the
  // all-monomorphic case must throw rather than emit a zero relatedness
  // matrix silently.
  bool saw_throw = false, saw_fit = false;
  for (std::uint64_t seed = 0; seed < 200 && !(saw_throw && saw_fit); ++seed) {
    try {
      const auto sim = encore::simulate_heritability_data({2, 1, 0.5, seed});
      saw_fit = true;
      CHECK(sim.grm.matrix().allFinite());
    } catch (const std::runtime_error&) {
      saw_throw = true;
    }
  }
  CHECK(saw_throw);
  CHECK(saw_fit);

  // A monomorphic column among polymorphic ones is zeroed, not an error.
  bool saw_zero_column = false;
  for (std::uint64_t seed = 0; seed < 500 && !saw_zero_column; ++seed) {
    try {
      const auto sim = encore::simulate_heritability_data({2, 3, 0.5, seed});
      for (int j = 0; j < 3; ++j)
        if (sim.genotypes.col(j).isZero(0.0)) saw_zero_column = true;
    } catch (const std::runtime_error&) {
    }
  }
  CHECK(saw_zero_column);
}

TEST_CASE("labeled CSV loading, coding, and standardization") {
  const auto dir = oracles::fresh_tmpdir("data");
  const auto path = dir + "/toy.csv";
  {
    std::ofstream out(path);
    out << "width,area,kind,height\n"
        << "1.0,5.0,oak,10\n"
        << "2.0,5.0,elm,20\n"
        << "3.0,5.0,oak,30\n"
        << "4.0,5.0,ash,40\n";
  }

  const auto raw = encore::load_labeled_csv(path, "kind", false);
  CHECK(raw.name == "toy");
  CHECK(raw.n_classes == 3);
  CHECK(raw.labels == std::vector<int>{0, 1, 0, 2});
  CHECK(raw.class_names == std::vector<std::string>{"oak", "elm", "ash"});
  CHECK(raw.feature_names ==
        std::vector<std::string>{"width", "area", "height"});
  CHECK(raw.x.rows() == 4);
  CHECK(raw.x.cols() == 3);
  CHECK(raw.x(0, 0) == 1.0);
  CHECK(raw.x(3, 2) == 40.0);

  const auto std_data = encore::load_labeled_csv(path, "kind", true);
  for (const int j : {0, 2}) {
    CHECK(std::abs(std_data.x.col(j).mean()) <= 1e-10);
    const double var =
        std_data.x.col(j).squaredNorm() / (std_data.x.rows() - 1);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-8));
  }
  // The constant column becomes zeros instead of dividing by zero.
  CHECK(std_data.x.col(1).isZero(0.0));

  std::filesystem::remove_all(dir);
}

TEST_CASE("labeled CSV loading rejects malformed input") {
  const auto dir = oracles::fresh_tmpdir("data");
  const auto write = [&](const std::string& name, const std::string& body) {
    const auto p = dir + "/" + name;
    std::ofstream out(p);
    out << body;
    return p;
  };

  const auto bad_cell = write("bad_cell.csv", "a,label\n1.0,x\noops,y\n");
  CHECK_THROWS_AS(encore::load_labeled_csv(bad_cell, "label", false),
                  std::runtime_error);

  const auto no_col = write("no_col.csv", "a,b\n1,2\n3,4\n");
  CHECK_THROWS_AS(encore::load_labeled_csv(no_col, "label", false),
                  std::runtime_error);

  const auto one_class = write("one_class.csv", "a,label\n1,x\n2,x\n");
  CHECK_THROWS_AS(encore::load_labeled_csv(one_class, "label", false),
                  std::runtime_error);

  CHECK_THROWS_AS(encore::load_labeled_csv(dir + "/missing.csv", "label", false),
                  std::runtime_error);

  std::filesystem::remove_all(dir);
}

TEST_CASE("bundled fatty-acid dataset loads with the documented shape") {
  const auto data = encore::load_labeled_csv(
      std::string(ENCORE_DATA_DIR) + "/olive_synthetic.csv", "macro.area", true);
  CHECK(data.x.rows() == 572);
  CHECK(data.x.cols() == 8);
  CHECK(data.n_classes == 3);
  CHECK(data.feature_names.front() == "palmitic");
  CHECK(data.feature_names.back() == "eicosenoic");
  CHECK(data.class_names ==
        std::vector<std::string>{"South", "Sardinia", "Centre.North"});
  std::vector<int> counts(3, 0);
  for (const int l : data.labels) counts[l]++;
  CHECK(counts == std::vector<int>{323, 98, 151});
}

TEST_CASE("clustering accuracy on known configurations") {
  CHECK(encore::clustering_accuracy({0, 1, 2, 0}, {0, 1, 2, 0}) == 1.0);
  // Renaming clusters must not matter.
  CHECK(encore::clustering_accuracy({2, 0, 1, 2}, {0, 1, 2, 0}) == 1.0);
  CHECK(encore::clustering_accuracy({0, 0, 1, 1}, {0, 1, 0, 1}) == 0.5);
  // More predicted clusters than classes: the two extra points map to a
  // dummy class and count as errors.
  CHECK(encore::clustering_accuracy({0, 0, 1, 2}, {0, 0, 0, 0}) == 0.5);
  // Fewer predicted clusters than classes.
  CHECK(encore::clustering_accuracy({0, 0, 0, 0}, {0, 0, 1, 2}) == 0.5);
}

TEST_CASE("clustering accuracy equals exhaustive mapping search") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto pred = random_labels(12, 2 + seed % 3, 9000 + seed);
    const auto truth = random_labels(12, 2 + seed % 2, 9100 + seed);
    const double got = encore::clustering_accuracy(pred, truth);
    const double want = oracles::brute_force_accuracy(pred, truth);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("clustering accuracy is invariant to relabeling") {
  const auto pred = random_labels(40, 4, 77);
  const auto truth = random_labels(40, 3, 78);
  const double base = encore::clustering_accuracy(pred, truth);
  // Shift and scramble the predicted codes.
  std::vector<int> renamed(pred.size());
  const int map[4] = {7, 2, 9, 4};
  for (std::size_t i = 0; i < pred.size(); ++i) renamed[i] = map[pred[i]];
  CHECK(encore::clustering_accuracy(renamed, truth) == base);
}

TEST_CASE("adjusted Rand index on known configurations") {
  CHECK(encore::adjusted_rand_index({0, 0, 1, 1}, {1, 1, 0, 0}) ==
        doctest::Approx(1.0));
  // A constant labeling against a real split carries no pair information.
  CHECK(encore::adjusted_rand_index({0, 0, 0, 0}, {0, 0, 1, 1}) ==
        doctest::Approx(0.0));
  // Two constant labelings agree trivially.
  CHECK(encore::adjusted_rand_index({3, 3, 3}, {5, 5, 5}) == 1.0);
}

TEST_CASE("adjusted Rand index equals pair counting") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto a = random_labels(25, 2 + seed % 4, 9200 + seed);
    const auto b = random_labels(25, 2 + seed % 3, 9300 + seed);
    const double got = encore::adjusted_rand_index(a, b);
    const double want = oracles::pair_count_ari(a, b);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
    CHECK(got == encore::adjusted_rand_index(b, a));
    CHECK(got <= 1.0 + 1e-12);
  }
}

TEST_CASE("metrics reject mismatched label vectors") {
  CHECK_THROWS_AS(encore::clustering_accuracy({0, 1}, {0, 1, 2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(encore::adjusted_rand_index({0, 1}, {0, 1, 2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(encore::clustering_accuracy({}, {}), std::invalid_argument);
}
