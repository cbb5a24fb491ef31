#include "encore/lmm.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace encore {

GrmMatrix::GrmMatrix(Eigen::MatrixXd g) : g_(std::move(g)) {
  if (g_.rows() < 1 || g_.rows() != g_.cols()) {
    throw std::invalid_argument("relationship matrix must be square");
  }
  if ((g_ - g_.transpose()).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::invalid_argument("relationship matrix must be symmetric");
  }
  Eigen::MatrixXd sym = 0.5 * (g_ + g_.transpose());
  g_ = std::move(sym);

  // PSD up to a small negative tolerance: the shifted matrix must factor.
  const double scale = std::max(1.0, g_.cwiseAbs().maxCoeff());
  Eigen::MatrixXd shifted = g_;
  shifted.diagonal().array() += 1e-6 * scale;
  if (Eigen::LLT<Eigen::MatrixXd>(shifted).info() != Eigen::Success) {
    throw std::invalid_argument("relationship matrix is not positive semidefinite");
  }
}

double heritability(const VarianceComponents& vc, double variance_floor) {
  if (vc.sigma_g <= variance_floor && vc.sigma_e <= variance_floor) return 0.0;
  const double total = vc.sigma_g + vc.sigma_e;
  if (total <= 0.0) return 0.0;
  return vc.sigma_g / total;
}

double heritability(const LmmFit& fit) { return heritability(fit.vc); }

namespace {

void validate_pieces(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, int n) {
  if (y.size() != n) throw std::invalid_argument("phenotype length does not match G");
  if (x.rows() != n) throw std::invalid_argument("design rows do not match G");
  const Eigen::Index q = x.cols();
  if (q < 1 || q >= n) {
    throw std::invalid_argument("design must have between 1 and n-1 columns");
  }
  if (!y.allFinite() || !x.allFinite()) {
    throw std::invalid_argument("inputs contain non-finite values");
  }
  if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(x).rank() < q) {
    throw std::invalid_argument("design matrix is rank deficient");
  }
}

void validate_components(const VarianceComponents& vc) {
  if (!(vc.sigma_g >= 0.0) || !(vc.sigma_e > 0.0)) {
    throw std::invalid_argument("variance components out of domain");
  }
}

struct RemlEval {
  double loglik = 0.0;
  Eigen::Vector2d score = Eigen::Vector2d::Zero();
  Eigen::Matrix2d avg_info = Eigen::Matrix2d::Zero();
  Eigen::VectorXd beta;
};

// One evaluation of the restricted likelihood surface. P is never formed;
// P u = V^-1 u - W C X' V^-1 u with W = V^-1 X and C = (X' V^-1 X)^-1.
RemlEval evaluate(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                  const Eigen::MatrixXd& g, const VarianceComponents& vc) {
  const Eigen::Index n = y.size();

  Eigen::MatrixXd v = vc.sigma_g * g;
  v.diagonal().array() += vc.sigma_e;
  Eigen::LLT<Eigen::MatrixXd> llt(v);
  if (llt.info() != Eigen::Success) {
    v.diagonal().array() += 1e-8 * v.trace() / static_cast<double>(n);
    llt.compute(v);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("phenotypic covariance numerically singular");
    }
  }
  const double logdet_v = 2.0 * llt.matrixLLT().diagonal().array().log().sum();

  Eigen::MatrixXd vi = llt.solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd w = llt.solve(x);
  Eigen::MatrixXd xtvix = x.transpose() * w;
  Eigen::LLT<Eigen::MatrixXd> cllt(xtvix);
  if (cllt.info() != Eigen::Success) {
    throw std::runtime_error("X' V^-1 X numerically singular");
  }
  const double logdet_c = 2.0 * cllt.matrixLLT().diagonal().array().log().sum();

  Eigen::VectorXd viy = llt.solve(y);
  Eigen::VectorXd beta = cllt.solve(x.transpose() * viy);
  Eigen::VectorXd py = viy - w * beta;
  const double ypy = y.dot(py);

  const auto apply_p = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    Eigen::VectorXd t = llt.solve(u);
    return t - w * cllt.solve(x.transpose() * t);
  };

  Eigen::MatrixXd cinv_wtw = cllt.solve(w.transpose() * w);
  Eigen::MatrixXd cinv_wtgw = cllt.solve(w.transpose() * (g * w));
  const double tr_p = vi.trace() - cinv_wtw.trace();
  const double tr_pg = vi.cwiseProduct(g).sum() - cinv_wtgw.trace();

  Eigen::VectorXd gpy = g * py;
  Eigen::VectorXd pgpy = apply_p(gpy);
  Eigen::VectorXd ppy = apply_p(py);

  RemlEval e;
  e.loglik = -0.5 * (logdet_v + logdet_c + ypy);
  e.score[0] = -0.5 * (tr_pg - py.dot(gpy));
  e.score[1] = -0.5 * (tr_p - py.squaredNorm());
  e.avg_info(0, 0) = 0.5 * gpy.dot(pgpy);
  e.avg_info(0, 1) = e.avg_info(1, 0) = 0.5 * py.dot(pgpy);
  e.avg_info(1, 1) = 0.5 * py.dot(ppy);
  e.beta = std::move(beta);
  return e;
}

// Newton direction from the average-information matrix, with a ridge
// fallback when it is numerically singular (G proportional to I makes it
// rank one; the symmetric ridge keeps the step symmetric in that case).
Eigen::Vector2d newton_direction(Eigen::Matrix2d ai, const Eigen::Vector2d& s) {
  const double scale = ai.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return s;
  double det = ai(0, 0) * ai(1, 1) - ai(0, 1) * ai(1, 0);
  if (std::abs(det) <= 1e-12 * scale * scale) {
    ai(0, 0) += 1e-8 * scale;
    ai(1, 1) += 1e-8 * scale;
    det = ai(0, 0) * ai(1, 1) - ai(0, 1) * ai(1, 0);
    if (std::abs(det) <= 1e-300) return s / scale;
  }
  return {(ai(1, 1) * s[0] - ai(0, 1) * s[1]) / det,
          (ai(0, 0) * s[1] - ai(1, 0) * s[0]) / det};
}

bool score_converged(const RemlEval& e, double rel_tolerance) {
  return e.score.cwiseAbs().maxCoeff() <= rel_tolerance * (1.0 + std::abs(e.loglik));
}

LmmFit fit_core(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                const Eigen::MatrixXd& g, const FitConfig& cfg) {
  const Eigen::Index n = y.size();
  const double mean = y.mean();
  const double var_y =
      std::max((y.array() - mean).square().sum() / static_cast<double>(n - 1), 1e-8);

  VarianceComponents vc{0.5 * var_y, 0.5 * var_y};
  RemlEval eval = evaluate(y, x, g, vc);

  LmmFit fit;
  fit.loglik_trace.push_back(eval.loglik);
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    if (score_converged(eval, cfg.rel_tolerance)) break;
    const Eigen::Vector2d delta = newton_direction(eval.avg_info, eval.score);
    bool accepted = false;
    double h = 1.0;
    for (int t = 0; t < 30; ++t) {
      VarianceComponents trial{
          std::max(vc.sigma_g + h * delta[0], cfg.variance_floor),
          std::max(vc.sigma_e + h * delta[1], cfg.variance_floor)};
      RemlEval trial_eval = evaluate(y, x, g, trial);
      if (trial_eval.loglik >= eval.loglik - 1e-10) {
        vc = trial;
        eval = std::move(trial_eval);
        accepted = true;
        break;
      }
      h *= 0.5;
    }
    if (!accepted) break;
    fit.n_iterations = it;
    fit.loglik_trace.push_back(eval.loglik);
  }

  fit.vc = vc;
  fit.beta_fixed = eval.beta;
  fit.h2 = heritability(vc, cfg.variance_floor);
  fit.reml_loglik = eval.loglik;
  fit.converged = score_converged(eval, cfg.rel_tolerance);
  return fit;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double reml_loglik(const LmmInputs& inputs, const VarianceComponents& vc) {
  validate_pieces(inputs.y, inputs.x, inputs.g.n_samples());
  validate_components(vc);
  return evaluate(inputs.y, inputs.x, inputs.g.matrix(), vc).loglik;
}

Eigen::Vector2d reml_score(const LmmInputs& inputs, const VarianceComponents& vc) {
  validate_pieces(inputs.y, inputs.x, inputs.g.n_samples());
  validate_components(vc);
  return evaluate(inputs.y, inputs.x, inputs.g.matrix(), vc).score;
}

LmmFit reml_fit(const LmmInputs& inputs, const FitConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_pieces(inputs.y, inputs.x, inputs.g.n_samples());
  LmmFit fit = fit_core(inputs.y, inputs.x, inputs.g.matrix(), cfg);
  fit.runtime_seconds = seconds_since(t0);
  return fit;
}

LmmFit encoded_reml_fit(const LmmInputs& inputs, const SampleEncoder& enc,
                        const FitConfig& cfg) {
  const int n = inputs.g.n_samples();
  validate_pieces(inputs.y, inputs.x, n);
  if (enc.source_rank != n) {
    throw std::invalid_argument("encoder was built for a different sample count");
  }
  if (enc.target_rank <= inputs.x.cols() + 1) {
    throw std::invalid_argument(
        "encoded dimension too small to identify two variance components");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::MatrixXd& a = enc.matrix_a;
  Eigen::VectorXd y_enc = a * inputs.y;
  Eigen::MatrixXd x_enc = a * inputs.x;
  Eigen::MatrixXd g_enc = a * (inputs.g.matrix() * a.transpose());
  Eigen::MatrixXd g_sym = 0.5 * (g_enc + g_enc.transpose());

  validate_pieces(y_enc, x_enc, enc.target_rank);
  LmmFit fit = fit_core(y_enc, x_enc, g_sym, cfg);
  fit.runtime_seconds = seconds_since(t0);
  return fit;
}

LmmFit encoded_reml_fit(const LmmInputs& inputs, int target_rank,
                        const FitConfig& cfg) {
  const int n = inputs.g.n_samples();
  validate_pieces(inputs.y, inputs.x, n);
  if (target_rank <= inputs.x.cols() + 1) {
    throw std::invalid_argument(
        "encoded dimension too small to identify two variance components");
  }

  const auto tb = std::chrono::steady_clock::now();
  SampleEncoder enc = fit_sample_encoder(inputs.g, target_rank);
  const double build_seconds = seconds_since(tb);

  const auto t0 = std::chrono::steady_clock::now();
  Eigen::VectorXd y_enc = enc.matrix_a * inputs.y;
  Eigen::MatrixXd x_enc = enc.matrix_a * inputs.x;
  // Rows of a freshly fitted encoder are eigenvectors of G, so the encoded
  // relationship matrix is exactly the diagonal of their eigenvalues.
  Eigen::MatrixXd g_enc = Eigen::MatrixXd(enc.spectrum.asDiagonal());

  validate_pieces(y_enc, x_enc, enc.target_rank);
  LmmFit fit = fit_core(y_enc, x_enc, g_enc, cfg);
  fit.runtime_seconds = seconds_since(t0);
  if (cfg.time_encoder_construction) fit.runtime_seconds += build_seconds;
  return fit;
}

}  // namespace encore
