#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "encore/data.hpp"
#include "encore/lmm.hpp"
#include "encore/mixture.hpp"

namespace encore {

/// One fit inside a benchmark sweep. `estimate` is the heritability for the
/// variance-component experiment and the clustering accuracy for the mixture
/// experiment; it is NaN when the fit errored and `error` holds the message.
struct BenchmarkRecord {
  std::string experiment;  // "lmm" | "mixture"
  std::string method;      // "full" | "encoded"
  int reduction_param = 0; // m or r; the un-encoded dimension for "full"
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double runtime_seconds = 0.0;
  std::string error;
};

struct GroupSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample sd, 0 when count < 2
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  int count = 0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRecord> records;
  // FNV-1a checksum of the simulated data per permutation seed; full and
  // encoded fits of one permutation share a draw by construction, and the
  // checksum makes that auditable across runs.
  std::map<std::uint64_t, std::uint64_t> data_checksums;
  // Worst-case EM diagnostics over all mixture fits in the sweep.
  double min_em_loglik_delta = 0.0;
  double max_resp_rowsum_error = 0.0;
};

/// Summary statistics of one record field per (method, reduction_param)
/// group, errored records excluded. Quantiles interpolate linearly between
/// order statistics.
std::map<std::pair<std::string, int>, GroupSummary> summarize(
    const std::vector<BenchmarkRecord>& records, bool use_runtime = false);

/// Heritability experiment: per permutation, draws a fresh dataset, fits the
/// full model and one encoded model per m in m_values on the same draw.
/// Permutation i uses seed base_seed + i. With run_parallel set,
/// permutations run concurrently (runtimes are then contaminated and only
/// the estimates are meaningful).
BenchmarkReport run_lmm_benchmark(const SimulationSpec& spec,
                                  const std::vector<int>& m_values,
                                  int n_permutations, std::uint64_t base_seed,
                                  const FitConfig& fit_cfg = {},
                                  bool run_parallel = false);

/// Clustering experiment: per run, fits the mixture on the raw features and
/// on each encoded dimension in r_values, scoring accuracy against the true
/// labels. Run i uses seed base_seed + i with a single EM restart, so
/// restart variability forms the run-to-run distribution.
BenchmarkReport run_mixture_benchmark(const LabeledDataset& dataset,
                                      const std::vector<int>& r_values, int k,
                                      int n_runs, CovarianceFamily family,
                                      std::uint64_t base_seed,
                                      const EmConfig& em_cfg = {},
                                      int q_factors = 1,
                                      bool run_parallel = false);

/// Writes records.csv, summary.json, and boxplot SVGs for the estimate and
/// runtime distributions into out_dir (created if missing). records.csv is
/// byte-identical across runs of the same sweep except for the
/// runtime_seconds column.
void emit_report(const BenchmarkReport& report, const std::string& out_dir);

}  // namespace encore
