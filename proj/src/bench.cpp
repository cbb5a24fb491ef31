#include "encore/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "encore/matrix_io.hpp"
#include "encore/stats.hpp"
#include "encore/svg.hpp"

namespace encore {

namespace {

std::uint64_t fnv1a(const double* data, std::size_t count,
                    std::uint64_t h = 14695981039346656037ULL) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < count * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

// Per-cell output of one benchmark unit (one permutation or one run), so
// parallel execution never shares mutable state.
struct CellOut {
  std::vector<BenchmarkRecord> records;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> checksum;
  double min_loglik_delta = std::numeric_limits<double>::infinity();
  double max_rowsum_error = 0.0;
};

void run_cells(int n_cells, bool run_parallel,
               const std::function<CellOut(int)>& run_one,
               std::vector<CellOut>* cells) {
  cells->resize(n_cells);
  const int n_workers =
      run_parallel
          ? std::max(1, std::min<int>(std::thread::hardware_concurrency(), n_cells))
          : 1;
  if (n_workers <= 1) {
    for (int i = 0; i < n_cells; ++i) (*cells)[i] = run_one(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n_cells; i = next.fetch_add(1)) {
        (*cells)[i] = run_one(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

BenchmarkReport merge_cells(std::vector<CellOut> cells) {
  BenchmarkReport report;
  report.min_em_loglik_delta = std::numeric_limits<double>::infinity();
  for (auto& c : cells) {
    for (auto& r : c.records) report.records.push_back(std::move(r));
    if (c.checksum) report.data_checksums.insert(*c.checksum);
    report.min_em_loglik_delta =
        std::min(report.min_em_loglik_delta, c.min_loglik_delta);
    report.max_resp_rowsum_error =
        std::max(report.max_resp_rowsum_error, c.max_rowsum_error);
  }
  if (!std::isfinite(report.min_em_loglik_delta)) report.min_em_loglik_delta = 0.0;
  return report;
}

void note_em_diagnostics(const MixtureModel& m, CellOut* cell) {
  for (std::size_t i = 1; i < m.loglik_trace.size(); ++i) {
    cell->min_loglik_delta = std::min(
        cell->min_loglik_delta, m.loglik_trace[i] - m.loglik_trace[i - 1]);
  }
  cell->max_rowsum_error =
      std::max(cell->max_rowsum_error, m.max_resp_rowsum_error);
}

BenchmarkRecord errored(std::string experiment, std::string method, int param,
                        std::uint64_t seed, const std::string& message) {
  BenchmarkRecord r;
  r.experiment = std::move(experiment);
  r.method = std::move(method);
  r.reduction_param = param;
  r.seed = seed;
  r.estimate = std::numeric_limits<double>::quiet_NaN();
  r.error = message;
  return r;
}

double bench_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::map<std::pair<std::string, int>, GroupSummary> summarize(
    const std::vector<BenchmarkRecord>& records, bool use_runtime) {
  std::map<std::pair<std::string, int>, std::vector<double>> groups;
  for (const auto& r : records) {
    if (!r.error.empty() || !std::isfinite(r.estimate)) continue;
    groups[{r.method, r.reduction_param}].push_back(
        use_runtime ? r.runtime_seconds : r.estimate);
  }
  std::map<std::pair<std::string, int>, GroupSummary> out;
  for (const auto& [key, vals] : groups) {
    GroupSummary s;
    s.mean = mean(vals);
    s.sd = sample_sd(vals);
    s.median = quantile(vals, 0.5);
    s.q25 = quantile(vals, 0.25);
    s.q75 = quantile(vals, 0.75);
    s.count = static_cast<int>(vals.size());
    out[key] = s;
  }
  return out;
}

BenchmarkReport run_lmm_benchmark(const SimulationSpec& spec,
                                  const std::vector<int>& m_values,
                                  int n_permutations, std::uint64_t base_seed,
                                  const FitConfig& fit_cfg, bool run_parallel) {
  if (n_permutations < 1) {
    throw std::invalid_argument("benchmark needs at least one permutation");
  }

  const auto run_one = [&](int perm) -> CellOut {
    CellOut cell;
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(perm);
    SimulationSpec draw = spec;
    draw.seed = seed;

    std::optional<HeritabilitySim> sim;
    try {
      sim.emplace(simulate_heritability_data(draw));
    } catch (const std::exception& ex) {
      cell.records.push_back(
          errored("lmm", "full", spec.n_samples, seed, ex.what()));
      for (int m : m_values) {
        cell.records.push_back(errored("lmm", "encoded", m, seed, ex.what()));
      }
      return cell;
    }

    std::uint64_t checksum =
        fnv1a(sim->phenotype.data(), sim->phenotype.size());
    checksum = fnv1a(sim->genotypes.data(), sim->genotypes.size(), checksum);
    cell.checksum = {seed, checksum};

    const Eigen::Index n = sim->phenotype.size();
    const LmmInputs inputs{std::move(sim->phenotype), Eigen::MatrixXd::Ones(n, 1),
                           std::move(sim->grm)};

    try {
      const LmmFit fit = reml_fit(inputs, fit_cfg);
      cell.records.push_back(BenchmarkRecord{"lmm", "full", spec.n_samples, seed,
                                             fit.h2, fit.runtime_seconds, ""});
    } catch (const std::exception& ex) {
      cell.records.push_back(errored("lmm", "full", spec.n_samples, seed, ex.what()));
    }
    for (int m : m_values) {
      try {
        const LmmFit fit = encoded_reml_fit(inputs, m, fit_cfg);
        cell.records.push_back(BenchmarkRecord{"lmm", "encoded", m, seed, fit.h2,
                                               fit.runtime_seconds, ""});
      } catch (const std::exception& ex) {
        cell.records.push_back(errored("lmm", "encoded", m, seed, ex.what()));
      }
    }
    return cell;
  };

  std::vector<CellOut> cells;
  run_cells(n_permutations, run_parallel, run_one, &cells);
  return merge_cells(std::move(cells));
}

BenchmarkReport run_mixture_benchmark(const LabeledDataset& dataset,
                                      const std::vector<int>& r_values, int k,
                                      int n_runs, CovarianceFamily family,
                                      std::uint64_t base_seed,
                                      const EmConfig& em_cfg, int q_factors,
                                      bool run_parallel) {
  if (n_runs < 1) throw std::invalid_argument("benchmark needs at least one run");
  const int p = static_cast<int>(dataset.x.cols());

  const auto run_one = [&](int run) -> CellOut {
    CellOut cell;
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(run);
    EmConfig cfg = em_cfg;
    cfg.seed = seed;
    cfg.n_restarts = 1;  // restart variability is the object of study

    try {
      const auto t0 = std::chrono::steady_clock::now();
      const MixtureModel model =
          family == CovarianceFamily::FullCovariance
              ? em_fit_gmm(dataset.x, k, cfg)
              : em_fit_mfa(dataset.x, k, q_factors, cfg);
      const double dt = bench_seconds(t0);
      note_em_diagnostics(model, &cell);
      const double acc =
          clustering_accuracy(cluster_assign(model, dataset.x), dataset.labels);
      cell.records.push_back(BenchmarkRecord{"mixture", "full", p, seed, acc, dt, ""});
    } catch (const std::exception& ex) {
      cell.records.push_back(errored("mixture", "full", p, seed, ex.what()));
    }

    for (int r : r_values) {
      try {
        const EncodedMixtureFit fit =
            encoded_mixture_fit(dataset.x, r, k, family, cfg, q_factors);
        note_em_diagnostics(fit.model, &cell);
        const Eigen::MatrixXd x_enc = encode_features(fit.encoder, dataset.x);
        const double acc =
            clustering_accuracy(cluster_assign(fit.model, x_enc), dataset.labels);
        cell.records.push_back(BenchmarkRecord{"mixture", "encoded", r, seed, acc,
                                               fit.runtime_seconds, ""});
      } catch (const std::exception& ex) {
        cell.records.push_back(errored("mixture", "encoded", r, seed, ex.what()));
      }
    }
    return cell;
  };

  std::vector<CellOut> cells;
  run_cells(n_runs, run_parallel, run_one, &cells);
  return merge_cells(std::move(cells));
}

void emit_report(const BenchmarkReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  {
    std::ofstream csv(fs::path(out_dir) / "records.csv");
    if (!csv) throw std::runtime_error("cannot write records.csv in " + out_dir);
    csv << "experiment,method,reduction_param,seed,estimate,runtime_seconds\n";
    char runtime_buf[40];
    for (const auto& r : report.records) {
      std::snprintf(runtime_buf, sizeof(runtime_buf), "%.9f", r.runtime_seconds);
      csv << r.experiment << ',' << r.method << ',' << r.reduction_param << ','
          << r.seed << ',' << format_double(r.estimate) << ',' << runtime_buf
          << '\n';
    }
  }

  const auto est = summarize(report.records, false);
  const auto rt = summarize(report.records, true);
  std::map<std::pair<std::string, int>, int> errors;
  for (const auto& r : report.records) {
    if (!r.error.empty()) ++errors[{r.method, r.reduction_param}];
  }

  nlohmann::json j;
  j["groups"] = nlohmann::json::array();
  std::map<std::pair<std::string, int>, bool> keys;
  for (const auto& [key, s] : est) keys[key] = true;
  for (const auto& [key, c] : errors) keys[key] = true;
  for (const auto& [key, unused] : keys) {
    nlohmann::json g;
    g["method"] = key.first;
    g["reduction_param"] = key.second;
    const auto fill = [](const GroupSummary& s) {
      return nlohmann::json{{"mean", s.mean},     {"sd", s.sd},
                            {"median", s.median}, {"q25", s.q25},
                            {"q75", s.q75},       {"count", s.count}};
    };
    if (auto it = est.find(key); it != est.end()) {
      g["estimate"] = fill(it->second);
      g["runtime_seconds"] = fill(rt.at(key));
    }
    g["errors"] = errors.count(key) ? errors.at(key) : 0;
    j["groups"].push_back(g);
  }

  nlohmann::json sums = nlohmann::json::object();
  char hex[20];
  for (const auto& [seed, sum] : report.data_checksums) {
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(sum));
    sums[std::to_string(seed)] = hex;
  }
  j["data_checksums"] = sums;
  j["diagnostics"] = {{"min_em_loglik_delta", report.min_em_loglik_delta},
                      {"max_resp_rowsum_error", report.max_resp_rowsum_error}};
  j["n_records"] = report.records.size();
  std::size_t n_errors = 0;
  for (const auto& r : report.records) {
    if (!r.error.empty()) ++n_errors;
  }
  j["n_errors"] = n_errors;

  {
    std::ofstream js(fs::path(out_dir) / "summary.json");
    if (!js) throw std::runtime_error("cannot write summary.json in " + out_dir);
    js << j.dump(2) << '\n';
  }

  std::map<std::pair<std::string, int>, std::vector<double>> est_groups, rt_groups;
  for (const auto& r : report.records) {
    if (!r.error.empty() || !std::isfinite(r.estimate)) continue;
    est_groups[{r.method, r.reduction_param}].push_back(r.estimate);
    rt_groups[{r.method, r.reduction_param}].push_back(r.runtime_seconds);
  }
  const auto to_groups = [](const std::map<std::pair<std::string, int>,
                                           std::vector<double>>& m) {
    std::vector<BoxGroup> out;
    for (const auto& [key, vals] : m) {
      out.push_back(BoxGroup{key.first + ":" + std::to_string(key.second), vals});
    }
    return out;
  };
  write_boxplot_svg((fs::path(out_dir) / "estimate.svg").string(),
                    "Estimate by method", "estimate", to_groups(est_groups));
  write_boxplot_svg((fs::path(out_dir) / "runtime_seconds.svg").string(),
                    "Runtime by method", "seconds", to_groups(rt_groups));
}

}  // namespace encore
