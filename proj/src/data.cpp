#include "encore/data.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "encore/matrix_io.hpp"

namespace encore {

HeritabilitySim simulate_heritability_data(const SimulationSpec& spec) {
  const int n = spec.n_samples;
  const int p = spec.n_snps;
  if (n < 2) throw std::invalid_argument("simulation needs at least 2 samples");
  if (p < 1) throw std::invalid_argument("simulation needs at least 1 SNP");
  if (!(spec.h2_true >= 0.0 && spec.h2_true <= 1.0)) {
    throw std::invalid_argument("h2 must lie in [0, 1]");
  }

  std::mt19937_64 rng(spec.seed);
  std::binomial_distribution<int> allele_count(2, 0.5);

  // Draw order is fixed: genotypes row by row, then effects, then noise.
  Eigen::MatrixXd z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) z(i, j) = allele_count(rng);

  int monomorphic = 0;
  for (int j = 0; j < p; ++j) {
    const double mean = z.col(j).mean();
    const double var = (z.col(j).array() - mean).square().sum() / (n - 1);
    if (var > 0.0) {
      z.col(j) = (z.col(j).array() - mean) / std::sqrt(var);
    } else {
      z.col(j).setZero();
      ++monomorphic;
    }
  }
  if (monomorphic == p) {
    throw std::runtime_error("all genotype columns are monomorphic");
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  const double effect_sd = std::sqrt(spec.h2_true / p);
  Eigen::VectorXd lambda(p);
  for (int j = 0; j < p; ++j) lambda[j] = effect_sd * gauss(rng);
  const double noise_sd = std::sqrt(1.0 - spec.h2_true);
  Eigen::VectorXd e(n);
  for (int i = 0; i < n; ++i) e[i] = noise_sd * gauss(rng);

  Eigen::VectorXd y = z * lambda + e;
  Eigen::MatrixXd g = (z * z.transpose()) / static_cast<double>(p);
  return HeritabilitySim{std::move(y), std::move(z), GrmMatrix(std::move(g))};
}

LabeledDataset load_labeled_csv(const std::string& path,
                                const std::string& label_column,
                                bool standardize) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file " + path);
  const auto header = split_csv_record(line);
  int label_idx = -1;
  LabeledDataset ds;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == label_column) {
      label_idx = static_cast<int>(j);
    } else {
      ds.feature_names.push_back(header[j]);
    }
  }
  if (label_idx < 0) {
    throw std::runtime_error(path + ": label column '" + label_column + "' not found");
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_record(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error("wrong field count at " + path + ":" +
                               std::to_string(lineno));
    }
    std::vector<double> row;
    row.reserve(fields.size() - 1);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (static_cast<int>(j) == label_idx) continue;
      row.push_back(parse_double(fields[j], path + ":" + std::to_string(lineno) +
                                                ":" + std::to_string(j + 1)));
    }
    const std::string& lab = fields[label_idx];
    auto it = std::find(ds.class_names.begin(), ds.class_names.end(), lab);
    if (it == ds.class_names.end()) {
      labels.push_back(static_cast<int>(ds.class_names.size()));
      ds.class_names.push_back(lab);
    } else {
      labels.push_back(static_cast<int>(it - ds.class_names.begin()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("no data rows in " + path);
  if (ds.class_names.size() < 2) {
    throw std::runtime_error(path + ": need at least two classes");
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(rows.front().size());
  ds.x.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) ds.x(i, j) = rows[i][j];
  ds.labels = std::move(labels);
  ds.n_classes = static_cast<int>(ds.class_names.size());
  ds.name = std::filesystem::path(path).stem().string();

  if (standardize && n > 1) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double mean = ds.x.col(j).mean();
      const double var = (ds.x.col(j).array() - mean).square().sum() / (n - 1);
      if (var > 0.0) {
        ds.x.col(j) = (ds.x.col(j).array() - mean) / std::sqrt(var);
      } else {
        ds.x.col(j).setZero();
      }
    }
  }
  return ds;
}

namespace {

// Compacts arbitrary label values to 0..k-1 in order of first appearance.
std::vector<int> compact_labels(const std::vector<int>& labels, int* k_out) {
  std::vector<int> seen;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find(seen.begin(), seen.end(), labels[i]);
    if (it == seen.end()) {
      out[i] = static_cast<int>(seen.size());
      seen.push_back(labels[i]);
    } else {
      out[i] = static_cast<int>(it - seen.begin());
    }
  }
  *k_out = static_cast<int>(seen.size());
  return out;
}

Eigen::MatrixXd contingency(const std::vector<int>& a, int ka,
                            const std::vector<int>& b, int kb) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(ka, kb);
  for (std::size_t i = 0; i < a.size(); ++i) c(a[i], b[i]) += 1.0;
  return c;
}

// Hungarian algorithm with potentials; returns the row-to-column assignment
// minimizing total cost on a square matrix.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (match[j] >= 1) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

void check_same_size(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("labelings must have equal length");
  }
  if (a.empty()) throw std::invalid_argument("labelings must be non-empty");
}

double comb2(double x) { return 0.5 * x * (x - 1.0); }

}  // namespace

double clustering_accuracy(const std::vector<int>& predicted,
                           const std::vector<int>& truth) {
  check_same_size(predicted, truth);
  int ka = 0, kb = 0;
  const auto pa = compact_labels(predicted, &ka);
  const auto tb = compact_labels(truth, &kb);
  const Eigen::MatrixXd counts = contingency(pa, ka, tb, kb);

  // Pad to square; dummy rows/columns contribute zero matches, which is how
  // a predicted cluster can stay unmapped when there are more clusters than
  // classes.
  const int k = std::max(ka, kb);
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(k, k);
  cost.topLeftCorner(ka, kb) = -counts;
  const auto assign = min_cost_assignment(cost);

  double matched = 0.0;
  for (int i = 0; i < ka; ++i) {
    if (assign[i] < kb) matched += counts(i, assign[i]);
  }
  return matched / static_cast<double>(predicted.size());
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  check_same_size(a, b);
  int ka = 0, kb = 0;
  const auto ca = compact_labels(a, &ka);
  const auto cb = compact_labels(b, &kb);
  const Eigen::MatrixXd counts = contingency(ca, ka, cb, kb);

  double index = 0.0;
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) index += comb2(counts(i, j));
  double sum_a = 0.0, sum_b = 0.0;
  for (int i = 0; i < ka; ++i) sum_a += comb2(counts.row(i).sum());
  for (int j = 0; j < kb; ++j) sum_b += comb2(counts.col(j).sum());
  const double total = comb2(static_cast<double>(a.size()));
  const double expected = total > 0.0 ? sum_a * sum_b / total : 0.0;
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (std::abs(denom) < 1e-12) return 1.0;  // both partitions carry no pair signal
  return (index - expected) / denom;
}

}  // namespace encore
