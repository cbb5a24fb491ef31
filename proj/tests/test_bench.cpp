#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "encore/bench.hpp"
#include "encore/matrix_io.hpp"
#include "oracles.hpp"

using encore::BenchmarkRecord;
using encore::BenchmarkReport;
using encore::SimulationSpec;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// records.csv with the runtime_seconds column blanked, for comparing repeat
// runs of the same deterministic sweep.
std::string strip_runtime_column(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto fields = encore::split_csv_record(line);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << (i == 5 ? "" : fields[i]);
    }
    out << '\n';
  }
  return out.str();
}

encore::LabeledDataset blob_dataset() {
  std::mt19937_64 rng(641);
  std::normal_distribution<double> gauss(0.0, 1.0);
  encore::LabeledDataset d;
  d.name = "blobs";
  d.n_classes = 2;
  d.x.resize(60, 2);
  for (int i = 0; i < 60; ++i) {
    const int b = i < 30 ? 0 : 1;
    d.x(i, 0) = (b ? 9.0 : 0.0) + gauss(rng);
    d.x(i, 1) = (b ? -4.0 : 0.0) + gauss(rng);
    d.labels.push_back(b);
  }
  d.feature_names = {"f0", "f1"};
  d.class_names = {"a", "b"};
  return d;
}

}  // namespace

TEST_CASE("summary statistics match hand-computed values") {
  std::vector<BenchmarkRecord> records;
  // Group full/10: estimates 1..9 plus one errored row to be excluded.
  for (int i = 1; i <= 9; ++i)
    records.push_back({"lmm", "full", 10, static_cast<std::uint64_t>(i),
                       static_cast<double>(i), 0.5, ""});
  records.push_back({"lmm", "full", 10, 99, std::nan(""), 0.0, "boom"});
  // Group encoded/5: two values.
  records.push_back({"lmm", "encoded", 5, 1, 2.0, 1.0, ""});
  records.push_back({"lmm", "encoded", 5, 2, 4.0, 3.0, ""});

  const auto groups = encore::summarize(records);
  REQUIRE(groups.size() == 2);

  const auto& full = groups.at({"full", 10});
  CHECK(full.count == 9);
  CHECK(full.mean == doctest::Approx(5.0));
  CHECK(full.sd == doctest::Approx(std::sqrt(60.0 / 8.0)));
  CHECK(full.median == doctest::Approx(5.0));
  CHECK(full.q25 == doctest::Approx(3.0));
  CHECK(full.q75 == doctest::Approx(7.0));

  const auto& enc = groups.at({"encoded", 5});
  CHECK(enc.count == 2);
  CHECK(enc.mean == doctest::Approx(3.0));
  CHECK(enc.sd == doctest::Approx(std::sqrt(2.0)));
  CHECK(enc.median == doctest::Approx(3.0));

  const auto runtimes = encore::summarize(records, true);
  CHECK(runtimes.at({"encoded", 5}).mean == doctest::Approx(2.0));
}

TEST_CASE("report files are written and well formed") {
  BenchmarkReport report;
  report.records.push_back({"lmm", "full", 50, 3, 0.5, 0.01, ""});
  report.data_checksums[3] = 0xdeadbeefcafef00dULL;

  const auto dir = oracles::fresh_tmpdir("bench");
  encore::emit_report(report, dir + "/out");

  const std::string csv = slurp(dir + "/out/records.csv");
  CHECK(csv.rfind("experiment,method,reduction_param,seed,estimate,runtime_seconds\n",
                  0) == 0);
  CHECK(csv.find("lmm,full,50,3,0.5,") != std::string::npos);

  const std::string json = slurp(dir + "/out/summary.json");
  CHECK(json.find("\"deadbeefcafef00d\"") != std::string::npos);
  CHECK(json.find("\"n_records\": 1") != std::string::npos);
  CHECK(json.find("\"n_errors\": 0") != std::string::npos);

  CHECK(slurp(dir + "/out/estimate.svg").find("<svg") != std::string::npos);
  CHECK(slurp(dir + "/out/runtime_seconds.svg").find("<svg") !=
        std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("an empty report still writes a valid header and files") {
  const auto dir = oracles::fresh_tmpdir("bench");
  encore::emit_report({}, dir + "/out");
  CHECK(slurp(dir + "/out/records.csv") ==
        "experiment,method,reduction_param,seed,estimate,runtime_seconds\n");
  CHECK(slurp(dir + "/out/estimate.svg").find("<svg") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("errored records serialize as nan rows") {
  BenchmarkReport report;
  report.records.push_back(
      {"mixture", "encoded", 2, 7, std::nan(""), 0.0, "did not converge"});
  const auto dir = oracles::fresh_tmpdir("bench");
  encore::emit_report(report, dir + "/out");
  const std::string csv = slurp(dir + "/out/records.csv");
  CHECK(csv.find("mixture,encoded,2,7,nan,") != std::string::npos);
  const std::string json = slurp(dir + "/out/summary.json");
  CHECK(json.find("\"n_errors\": 1") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("heritability sweep is reproducible modulo runtimes") {
  const SimulationSpec spec{80, 40, 0.5, 0};
  const std::vector<int> m_values{20, 40};
  const auto run = [&] {
    const auto dir = oracles::fresh_tmpdir("bench");
    encore::emit_report(
        encore::run_lmm_benchmark(spec, m_values, 4, 17), dir + "/out");
    const std::string stripped = strip_runtime_column(slurp(dir + "/out/records.csv"));
    std::filesystem::remove_all(dir);
    return stripped;
  };
  const std::string first = run();
  const std::string second = run();
  CHECK(first == second);
  CHECK(first.find("lmm,full,80,") != std::string::npos);
  CHECK(first.find("lmm,encoded,20,") != std::string::npos);
  CHECK(first.find("lmm,encoded,40,") != std::string::npos);
}

TEST_CASE("heritability sweep shares one draw per permutation") {
  const auto report =
      encore::run_lmm_benchmark({60, 30, 0.5, 0}, {30}, 3, 400);
  CHECK(report.data_checksums.size() == 3);
  CHECK(report.data_checksums.count(400) == 1);
  CHECK(report.data_checksums.count(402) == 1);
  // 3 permutations x (1 full + 1 encoded) fits.
  CHECK(report.records.size() == 6);
  for (const auto& rec : report.records) {
    CHECK(rec.error.empty());
    CHECK(std::isfinite(rec.estimate));
    CHECK(rec.estimate >= 0.0);
    CHECK(rec.estimate <= 1.0);
    CHECK(rec.runtime_seconds > 0.0);
  }
}

TEST_CASE("full-rank encoded sweep reproduces the full fits") {
  const auto report = encore::run_lmm_benchmark({50, 40, 0.5, 0}, {50}, 2, 88);
  const auto groups = encore::summarize(report.records);
  const auto& full = groups.at({"full", 50});
  const auto& enc = groups.at({"encoded", 50});
  CHECK(full.count == 2);
  CHECK(enc.count == 2);
  CHECK(std::abs(full.mean - enc.mean) <= 1e-6);
}

TEST_CASE("deeper reductions do not slow the encoded fit down") {
  // Medians over a few permutations; encoder construction is included, so
  // this also guards against the encoder dominating at small m.
  const auto report =
      encore::run_lmm_benchmark({200, 60, 0.5, 0}, {50, 100, 150}, 5, 10);
  const auto groups = encore::summarize(report.records, true);
  const double t50 = groups.at({"encoded", 50}).median;
  const double t100 = groups.at({"encoded", 100}).median;
  const double t150 = groups.at({"encoded", 150}).median;
  CHECK(t50 <= t100 * 1.5);
  CHECK(t100 <= t150 * 1.5);
}

TEST_CASE("clustering sweep scores separated blobs perfectly") {
  const auto data = blob_dataset();
  const auto report = encore::run_mixture_benchmark(
      data, {1, 2}, 2, 3, encore::CovarianceFamily::FullCovariance, 55);
  // 3 runs x (1 full + 2 encoded).
  CHECK(report.records.size() == 9);
  double best_full = 0.0;
  std::map<std::uint64_t, double> full_by_seed, enc2_by_seed;
  for (const auto& rec : report.records) {
    CHECK(rec.error.empty());
    // Single restarts can land in a merged local optimum, but never worse.
    CHECK(rec.estimate >= 0.7);
    if (rec.method == "full") {
      best_full = std::max(best_full, rec.estimate);
      full_by_seed[rec.seed] = rec.estimate;
    } else if (rec.reduction_param == 2) {
      enc2_by_seed[rec.seed] = rec.estimate;
    }
  }
  CHECK(best_full == 1.0);
  // Full-width encoding is a rotation, so each run lands on the same
  // optimum as its unencoded twin.
  CHECK(full_by_seed == enc2_by_seed);
  CHECK(report.min_em_loglik_delta >= -1e-8);
  CHECK(report.max_resp_rowsum_error <= 1e-12);

  const auto groups = encore::summarize(report.records);
  CHECK(groups.at({"full", 2}).count == 3);
  CHECK(groups.at({"encoded", 1}).count == 3);
}

TEST_CASE("clustering sweep is reproducible modulo runtimes") {
  const auto data = blob_dataset();
  const auto run = [&] {
    const auto dir = oracles::fresh_tmpdir("bench");
    encore::emit_report(
        encore::run_mixture_benchmark(
            data, {1, 2}, 2, 4, encore::CovarianceFamily::FactorAnalytic, 3),
        dir + "/out");
    const std::string stripped = strip_runtime_column(slurp(dir + "/out/records.csv"));
    std::filesystem::remove_all(dir);
    return stripped;
  };
  CHECK(run() == run());
}

TEST_CASE("parallel execution changes runtimes only") {
  const SimulationSpec spec{60, 30, 0.5, 0};
  const auto serial = encore::run_lmm_benchmark(spec, {30}, 4, 21, {}, false);
  const auto parallel = encore::run_lmm_benchmark(spec, {30}, 4, 21, {}, true);
  REQUIRE(serial.records.size() == parallel.records.size());
  for (std::size_t i = 0; i < serial.records.size(); ++i) {
    CHECK(serial.records[i].method == parallel.records[i].method);
    CHECK(serial.records[i].seed == parallel.records[i].seed);
    CHECK(serial.records[i].estimate == parallel.records[i].estimate);
  }
  CHECK(serial.data_checksums == parallel.data_checksums);
}
