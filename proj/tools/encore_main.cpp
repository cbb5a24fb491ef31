#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "encore/bench.hpp"
#include "encore/data.hpp"
#include "encore/encoding.hpp"
#include "encore/lmm.hpp"
#include "encore/matrix_io.hpp"
#include "encore/mixture.hpp"

namespace fs = std::filesystem;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

void emit_json(const nlohmann::json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_text(out_path, j.dump(2) + "\n");
  }
}

encore::CovarianceFamily parse_family(const std::string& name) {
  if (name == "full") return encore::CovarianceFamily::FullCovariance;
  if (name == "factor") return encore::CovarianceFamily::FactorAnalytic;
  throw CLI::ValidationError("--family", "must be 'full' or 'factor'");
}

nlohmann::json lmm_fit_json(const encore::LmmFit& fit) {
  return nlohmann::json{{"sigma_g", fit.vc.sigma_g},
                        {"sigma_e", fit.vc.sigma_e},
                        {"h2", fit.h2},
                        {"loglik", fit.reml_loglik},
                        {"iterations", fit.n_iterations},
                        {"converged", fit.converged},
                        {"runtime_seconds", fit.runtime_seconds}};
}

int report_errors(const encore::BenchmarkReport& report) {
  int n_errors = 0;
  for (const auto& r : report.records) {
    if (!r.error.empty()) {
      ++n_errors;
      std::cerr << "error: " << r.method << ":" << r.reduction_param << " seed "
                << r.seed << ": " << r.error << '\n';
    }
  }
  return n_errors;
}

void print_group_summaries(const encore::BenchmarkReport& report) {
  const auto est = encore::summarize(report.records, false);
  const auto rt = encore::summarize(report.records, true);
  for (const auto& [key, s] : est) {
    std::printf("%s m=%d  estimate mean %.4f sd %.4f median %.4f  runtime median %.3fs (%d fits)\n",
                key.first.c_str(), key.second, s.mean, s.sd, s.median,
                rt.at(key).median, s.count);
  }
}

struct SimulateArgs {
  int n = 1000;
  int snps = 100;
  double h2 = 0.5;
  std::uint64_t seed = 1;
  std::string out_dir;
};

void run_simulate(const SimulateArgs& a) {
  const encore::HeritabilitySim sim = encore::simulate_heritability_data(
      encore::SimulationSpec{a.n, a.snps, a.h2, a.seed});
  fs::create_directories(a.out_dir);
  encore::write_vector_csv(sim.phenotype, (fs::path(a.out_dir) / "phenotype.csv").string());
  encore::write_matrix_csv(sim.genotypes, (fs::path(a.out_dir) / "genotypes.csv").string());
  encore::write_matrix_csv(sim.grm.matrix(), (fs::path(a.out_dir) / "grm.csv").string());
  std::cout << "wrote phenotype.csv, genotypes.csv, grm.csv to " << a.out_dir << '\n';
}

struct EncodeArgs {
  std::string grm_path;
  int m = 0;
  std::string data_path;
  int r = 0;
  std::string label_column;
  bool standardize = false;
  std::string out;
};

void run_encode(const EncodeArgs& a) {
  const bool sample_mode = !a.grm_path.empty();
  const bool feature_mode = !a.data_path.empty();
  if (sample_mode == feature_mode) {
    throw CLI::ValidationError("encode", "use exactly one of --grm/--m or --data/--r");
  }
  if (sample_mode) {
    if (a.m < 1) throw CLI::ValidationError("encode", "--m is required with --grm");
    const encore::GrmMatrix g(encore::read_matrix_csv(a.grm_path));
    const encore::SampleEncoder enc = encore::fit_sample_encoder(g, a.m);
    encore::save_sample_encoder(enc, a.out);
    std::cout << "wrote sample encoder (" << enc.target_rank << " x "
              << enc.source_rank << ") to " << a.out << '\n';
    return;
  }
  if (a.r < 1) throw CLI::ValidationError("encode", "--r is required with --data");
  Eigen::MatrixXd x;
  if (a.label_column.empty()) {
    x = encore::read_matrix_csv(a.data_path);
  } else {
    x = encore::load_labeled_csv(a.data_path, a.label_column, a.standardize).x;
  }
  const encore::FeatureEncoder enc = encore::fit_feature_encoder(x, a.r);
  encore::save_feature_encoder(enc, a.out);
  std::cout << "wrote feature encoder (" << enc.source_dim << " -> "
            << enc.target_dim << ") to " << a.out << '\n';
}

struct FitLmmArgs {
  std::string pheno_path;
  std::string grm_path;
  std::string design_path;
  std::string encoder_path;
  int m = 0;
  bool exclude_encoder_time = false;
  int max_iterations = 200;
  double tolerance = 1e-6;
  std::string out;
};

void run_fit_lmm(const FitLmmArgs& a) {
  if (!a.encoder_path.empty() && a.m > 0) {
    throw CLI::ValidationError("fit-lmm", "--encoder and --m are mutually exclusive");
  }
  Eigen::VectorXd y = encore::read_vector_csv(a.pheno_path);
  Eigen::MatrixXd x = a.design_path.empty()
                          ? Eigen::MatrixXd::Ones(y.size(), 1)
                          : encore::read_matrix_csv(a.design_path);
  encore::LmmInputs inputs{std::move(y), std::move(x),
                           encore::GrmMatrix(encore::read_matrix_csv(a.grm_path))};
  encore::FitConfig cfg;
  cfg.max_iterations = a.max_iterations;
  cfg.rel_tolerance = a.tolerance;
  cfg.time_encoder_construction = !a.exclude_encoder_time;

  encore::LmmFit fit;
  if (!a.encoder_path.empty()) {
    fit = encore::encoded_reml_fit(inputs, encore::load_sample_encoder(a.encoder_path), cfg);
  } else if (a.m > 0) {
    fit = encore::encoded_reml_fit(inputs, a.m, cfg);
  } else {
    fit = encore::reml_fit(inputs, cfg);
  }
  emit_json(lmm_fit_json(fit), a.out);
}

struct FitMixtureArgs {
  std::string data_path;
  std::string label_column;
  int k = 0;
  std::string family = "full";
  int factors = 1;
  std::string encoder_path;
  int r = 0;
  bool standardize = false;
  std::uint64_t seed = 1;
  int restarts = 10;
  int max_iterations = 500;
  double tolerance = 1e-8;
  std::string out;
  std::string assignments;
};

void run_fit_mixture(const FitMixtureArgs& a) {
  if (!a.encoder_path.empty() && a.r > 0) {
    throw CLI::ValidationError("fit-mixture", "--encoder and --r are mutually exclusive");
  }
  Eigen::MatrixXd x;
  std::vector<int> truth;
  int k = a.k;
  if (a.label_column.empty()) {
    x = encore::read_matrix_csv(a.data_path);
    if (a.standardize) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double mu = x.col(j).mean();
        const double var = (x.col(j).array() - mu).square().sum() / (x.rows() - 1);
        if (var > 0.0) x.col(j) = (x.col(j).array() - mu) / std::sqrt(var);
      }
    }
  } else {
    encore::LabeledDataset ds =
        encore::load_labeled_csv(a.data_path, a.label_column, a.standardize);
    x = std::move(ds.x);
    truth = std::move(ds.labels);
    if (k == 0) k = ds.n_classes;
  }
  if (k < 1) throw CLI::ValidationError("fit-mixture", "--k is required without labels");

  const encore::CovarianceFamily family = parse_family(a.family);
  encore::EmConfig cfg;
  cfg.seed = a.seed;
  cfg.n_restarts = a.restarts;
  cfg.max_iterations = a.max_iterations;
  cfg.rel_tolerance = a.tolerance;

  encore::MixtureModel model;
  std::vector<int> labels;
  if (!a.encoder_path.empty() || a.r > 0) {
    encore::EncodedMixtureFit fit =
        a.r > 0 ? encore::encoded_mixture_fit(x, a.r, k, family, cfg, a.factors)
                : encore::encoded_mixture_fit(
                      x, encore::load_feature_encoder(a.encoder_path), k, family,
                      cfg, a.factors);
    const Eigen::MatrixXd x_enc = encore::encode_features(fit.encoder, x);
    labels = encore::cluster_assign(fit.model, x_enc);
    model = std::move(fit.model);
  } else {
    model = family == encore::CovarianceFamily::FullCovariance
                ? encore::em_fit_gmm(x, k, cfg)
                : encore::em_fit_mfa(x, k, a.factors, cfg);
    labels = encore::cluster_assign(model, x);
  }

  if (!truth.empty()) {
    std::printf("accuracy %.4f  ari %.4f\n",
                encore::clustering_accuracy(labels, truth),
                encore::adjusted_rand_index(labels, truth));
  }
  if (!a.assignments.empty()) {
    Eigen::VectorXd lv(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) lv[i] = labels[i];
    encore::write_vector_csv(lv, a.assignments);
  }
  const std::string model_json = encore::mixture_model_to_json(model);
  if (a.out.empty()) {
    std::cout << model_json << '\n';
  } else {
    write_text(a.out, model_json + "\n");
  }
}

struct BenchLmmArgs {
  int n = 1000;
  int snps = 100;
  double h2 = 0.5;
  int permutations = 100;
  std::vector<int> m_values;
  std::uint64_t seed = 1;
  int max_iterations = 200;
  double tolerance = 1e-6;
  bool parallel = false;
  std::string out_dir;
};

int run_bench_lmm(const BenchLmmArgs& a) {
  std::vector<int> ms = a.m_values;
  if (ms.empty()) ms.push_back(a.n / 2);
  encore::FitConfig cfg;
  cfg.max_iterations = a.max_iterations;
  cfg.rel_tolerance = a.tolerance;
  const encore::BenchmarkReport report = encore::run_lmm_benchmark(
      encore::SimulationSpec{a.n, a.snps, a.h2, 0}, ms, a.permutations, a.seed,
      cfg, a.parallel);
  encore::emit_report(report, a.out_dir);
  print_group_summaries(report);
  const int n_errors = report_errors(report);
  std::cout << "report written to " << a.out_dir << " (" << report.records.size()
            << " records, " << n_errors << " errored)\n";
  return n_errors > 0 ? 1 : 0;
}

struct BenchMixtureArgs {
  std::string data_path;
  std::string label_column;
  int k = 0;
  std::vector<int> r_values;
  int runs = 100;
  std::string family = "full";
  int factors = 1;
  bool standardize = true;
  std::uint64_t seed = 1;
  bool parallel = false;
  std::string out_dir;
};

int run_bench_mixture(const BenchMixtureArgs& a) {
  const encore::LabeledDataset ds =
      encore::load_labeled_csv(a.data_path, a.label_column, a.standardize);
  const int k = a.k > 0 ? a.k : ds.n_classes;
  std::vector<int> rs = a.r_values;
  if (rs.empty()) {
    for (int r = 2; r <= std::min<int>(8, ds.x.cols()); ++r) rs.push_back(r);
  }
  const encore::BenchmarkReport report = encore::run_mixture_benchmark(
      ds, rs, k, a.runs, parse_family(a.family), a.seed, encore::EmConfig{},
      a.factors, a.parallel);
  encore::emit_report(report, a.out_dir);
  print_group_summaries(report);
  const int n_errors = report_errors(report);
  std::cout << "report written to " << a.out_dir << " (" << report.records.size()
            << " records, " << n_errors << " errored)\n";
  return n_errors > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"encore: encoded estimation for mixed models and Gaussian mixtures"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI file (sections per subcommand)");
  int exit_code = 0;

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "simulate a heritability dataset");
  c_sim->add_option("--n", sim.n, "samples")->check(CLI::PositiveNumber);
  c_sim->add_option("--snps", sim.snps, "SNP count")->check(CLI::PositiveNumber);
  c_sim->add_option("--h2", sim.h2, "true heritability")->check(CLI::Range(0.0, 1.0));
  c_sim->add_option("--seed", sim.seed, "RNG seed");
  c_sim->add_option("--out-dir", sim.out_dir, "output directory")->required();
  c_sim->callback([&] { run_simulate(sim); });

  EncodeArgs enc;
  auto* c_enc = app.add_subcommand("encode", "fit and save an encoder");
  c_enc->add_option("--grm", enc.grm_path, "GRM CSV (sample encoder)");
  c_enc->add_option("--m", enc.m, "encoded sample count");
  c_enc->add_option("--data", enc.data_path, "data CSV (feature encoder)");
  c_enc->add_option("--r", enc.r, "encoded feature count");
  c_enc->add_option("--label-column", enc.label_column, "label column to drop");
  c_enc->add_flag("--standardize,!--no-standardize", enc.standardize,
                  "z-score feature columns");
  c_enc->add_option("--out", enc.out, "encoder output path")->required();
  c_enc->callback([&] { run_encode(enc); });

  FitLmmArgs flm;
  auto* c_lmm = app.add_subcommand("fit-lmm", "REML fit of two variance components");
  c_lmm->add_option("--pheno", flm.pheno_path, "phenotype CSV")->required();
  c_lmm->add_option("--grm", flm.grm_path, "GRM CSV")->required();
  c_lmm->add_option("--design", flm.design_path, "fixed-effect design CSV (default intercept)");
  c_lmm->add_option("--encoder", flm.encoder_path, "sample encoder file");
  c_lmm->add_option("--m", flm.m, "build an encoder of this rank");
  c_lmm->add_flag("--exclude-encoder-time", flm.exclude_encoder_time,
                  "leave encoder construction out of runtime_seconds");
  c_lmm->add_option("--max-iterations", flm.max_iterations, "iteration cap");
  c_lmm->add_option("--tolerance", flm.tolerance, "score tolerance");
  c_lmm->add_option("--out", flm.out, "output JSON path (default stdout)");
  c_lmm->callback([&] { run_fit_lmm(flm); });

  FitMixtureArgs fmx;
  auto* c_mix = app.add_subcommand("fit-mixture", "EM fit of a Gaussian mixture");
  c_mix->add_option("--data", fmx.data_path, "data CSV")->required();
  c_mix->add_option("--label-column", fmx.label_column, "label column (enables accuracy)");
  c_mix->add_option("--k", fmx.k, "components (default: class count)");
  c_mix->add_option("--family", fmx.family, "full | factor");
  c_mix->add_option("--factors", fmx.factors, "factors per component");
  c_mix->add_option("--encoder", fmx.encoder_path, "feature encoder file");
  c_mix->add_option("--r", fmx.r, "build an encoder of this dimension");
  c_mix->add_flag("--standardize,!--no-standardize", fmx.standardize,
                  "z-score feature columns");
  c_mix->add_option("--seed", fmx.seed, "RNG seed");
  c_mix->add_option("--restarts", fmx.restarts, "EM restarts");
  c_mix->add_option("--max-iterations", fmx.max_iterations, "EM iteration cap");
  c_mix->add_option("--tolerance", fmx.tolerance, "per-sample loglik tolerance");
  c_mix->add_option("--out", fmx.out, "model JSON path (default stdout)");
  c_mix->add_option("--assignments", fmx.assignments, "cluster labels CSV path");
  c_mix->callback([&] { run_fit_mixture(fmx); });

  BenchLmmArgs blm;
  auto* c_blm = app.add_subcommand("bench-lmm", "heritability benchmark sweep");
  c_blm->add_option("--n", blm.n, "samples")->check(CLI::PositiveNumber);
  c_blm->add_option("--snps", blm.snps, "SNP count")->check(CLI::PositiveNumber);
  c_blm->add_option("--h2", blm.h2, "true heritability")->check(CLI::Range(0.0, 1.0));
  c_blm->add_option("--permutations", blm.permutations, "dataset draws")
      ->check(CLI::PositiveNumber);
  c_blm->add_option("--m", blm.m_values, "encoded sizes (repeatable)")->delimiter(',');
  c_blm->add_option("--seed", blm.seed, "base seed");
  c_blm->add_option("--max-iterations", blm.max_iterations, "iteration cap");
  c_blm->add_option("--tolerance", blm.tolerance, "score tolerance");
  c_blm->add_flag("--parallel", blm.parallel, "parallel permutations (contaminates runtimes)");
  c_blm->add_option("--out-dir", blm.out_dir, "report directory")->required();
  c_blm->callback([&] { exit_code = run_bench_lmm(blm); });

  BenchMixtureArgs bmx;
  auto* c_bmx = app.add_subcommand("bench-mixture", "clustering benchmark sweep");
  c_bmx->add_option("--data", bmx.data_path, "labeled data CSV")->required();
  c_bmx->add_option("--label-column", bmx.label_column, "label column")->required();
  c_bmx->add_option("--k", bmx.k, "components (default: class count)");
  c_bmx->add_option("--r", bmx.r_values, "encoded dimensions (repeatable)")->delimiter(',');
  c_bmx->add_option("--runs", bmx.runs, "restart draws")->check(CLI::PositiveNumber);
  c_bmx->add_option("--family", bmx.family, "full | factor");
  c_bmx->add_option("--factors", bmx.factors, "factors per component");
  c_bmx->add_flag("--standardize,!--no-standardize", bmx.standardize,
                  "z-score feature columns");
  c_bmx->add_option("--seed", bmx.seed, "base seed");
  c_bmx->add_flag("--parallel", bmx.parallel, "parallel runs (contaminates runtimes)");
  c_bmx->add_option("--out-dir", bmx.out_dir, "report directory")->required();
  c_bmx->callback([&] { exit_code = run_bench_mixture(bmx); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return exit_code;
}
