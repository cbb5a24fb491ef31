#include "encore/mixture.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace encore {

namespace {

constexpr double kNoiseFloor = 1e-6;
constexpr double kCollapseFraction = 1e-10;  // of n, responsibility mass
constexpr double kLogTwoPi = 1.8378770664093454836;

// Spectral pseudo-factorization of a PSD covariance. Eigenvalues at or below
// max(lambda) * 1e-12 are treated as exact zeros, so rank-deficient
// covariances (decoded models) get a proper pseudo-density on their support.
class ComponentDensity {
 public:
  ComponentDensity(Eigen::VectorXd mean, const Eigen::MatrixXd& cov)
      : mean_(std::move(mean)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("covariance eigendecomposition failed");
    }
    const Eigen::VectorXd& lam = es.eigenvalues();  // ascending
    const double cutoff = std::max(lam[lam.size() - 1], 0.0) * 1e-12;
    int rank = 0;
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      if (lam[i] > cutoff) {
        ++rank;
        logdet += std::log(lam[i]);
      }
    }
    if (rank == 0) throw std::runtime_error("covariance has no positive spectrum");
    scaled_basis_.resize(cov.rows(), rank);
    int c = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      if (lam[i] > cutoff) {
        scaled_basis_.col(c++) = es.eigenvectors().col(i) / std::sqrt(lam[i]);
      }
    }
    log_norm_ = -0.5 * (rank * kLogTwoPi + logdet);
  }

  double log_density(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd t = scaled_basis_.transpose() * (x - mean_);
    return log_norm_ - 0.5 * t.squaredNorm();
  }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd scaled_basis_;  // d x rank, U diag(lambda^-1/2)
  double log_norm_ = 0.0;
};

std::vector<ComponentDensity> make_densities(const MixtureModel& m) {
  std::vector<ComponentDensity> out;
  out.reserve(m.k);
  for (int i = 0; i < m.k; ++i) out.emplace_back(m.means[i], m.covariances[i]);
  return out;
}

struct EStep {
  Eigen::MatrixXd resp;  // n x k
  double loglik = 0.0;
  double max_rowsum_error = 0.0;
};

EStep e_step(const Eigen::MatrixXd& x, const MixtureModel& m,
             const std::vector<ComponentDensity>& dens) {
  const Eigen::Index n = x.rows();
  const int k = m.k;
  EStep out;
  out.resp.resize(n, k);
  Eigen::VectorXd lp(k);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (int i = 0; i < k; ++i) {
      lp[i] = std::log(m.weights[i]) + dens[i].log_density(x.row(j).transpose());
    }
    const double top = lp.maxCoeff();
    const double lse = top + std::log((lp.array() - top).exp().sum());
    out.loglik += lse;
    out.resp.row(j) = (lp.array() - lse).exp().matrix().transpose();
    out.max_rowsum_error =
        std::max(out.max_rowsum_error, std::abs(out.resp.row(j).sum() - 1.0));
  }
  if (!std::isfinite(out.loglik)) {
    throw std::runtime_error("mixture log-likelihood is not finite");
  }
  return out;
}

Eigen::MatrixXd pooled_covariance(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(x.rows() - 1);
}

std::vector<int> kmeanspp_centers(const Eigen::MatrixXd& x, int k,
                                  std::mt19937_64& rng) {
  const auto n = static_cast<int>(x.rows());
  std::uniform_int_distribution<int> uniform(0, n - 1);
  std::vector<int> centers{uniform(rng)};
  Eigen::VectorXd d2 =
      (x.rowwise() - x.row(centers[0])).rowwise().squaredNorm();
  while (static_cast<int>(centers.size()) < k) {
    int next;
    if (d2.sum() > 0.0) {
      std::discrete_distribution<int> pick(d2.data(), d2.data() + n);
      next = pick(rng);
    } else {
      next = uniform(rng);  // all remaining points coincide with a center
    }
    centers.push_back(next);
    d2 = d2.cwiseMin((x.rowwise() - x.row(next)).rowwise().squaredNorm());
  }
  return centers;
}

// Principal-direction loadings for a covariance: top-q eigenvectors scaled
// by sqrt(eigenvalue), plus the diagonal remainder floored away from zero.
void principal_loadings(const Eigen::MatrixXd& cov, int q,
                        Eigen::MatrixXd* loadings, Eigen::VectorXd* noise) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const Eigen::Index d = cov.rows();
  loadings->resize(d, q);
  for (int c = 0; c < q; ++c) {
    const Eigen::Index i = d - 1 - c;  // descending
    const double lam = std::max(es.eigenvalues()[i], 0.0);
    loadings->col(c) = es.eigenvectors().col(i) * std::sqrt(lam);
  }
  *noise = (cov.diagonal() - loadings->rowwise().squaredNorm())
               .cwiseMax(kNoiseFloor);
}

MixtureModel seed_model(const Eigen::MatrixXd& x, int k, CovarianceFamily family,
                        int q, const Eigen::MatrixXd& pooled, double ridge,
                        std::mt19937_64& rng) {
  const auto n = static_cast<int>(x.rows());
  const auto d = x.cols();
  const auto centers = kmeanspp_centers(x, k, rng);

  MixtureModel m;
  m.k = k;
  m.family = family;
  m.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
  Eigen::MatrixXd ridged = pooled;
  ridged.diagonal().array() += ridge;

  if (family == CovarianceFamily::FullCovariance) {
    for (int i = 0; i < k; ++i) {
      m.means.push_back(x.row(centers[i]).transpose());
      m.covariances.push_back(ridged);
    }
    return m;
  }

  // Factor-analytic: hard-assign points to the nearest center and take each
  // cluster's top-q principal directions as initial loadings.
  std::vector<std::vector<int>> members(k);
  for (int j = 0; j < n; ++j) {
    int best = 0;
    double best_d = (x.row(j) - x.row(centers[0])).squaredNorm();
    for (int i = 1; i < k; ++i) {
      const double dist = (x.row(j) - x.row(centers[i])).squaredNorm();
      if (dist < best_d) {
        best_d = dist;
        best = i;
      }
    }
    members[best].push_back(j);
  }
  Eigen::VectorXd sizes(k);
  for (int i = 0; i < k; ++i) {
    const auto& rows = members[i];
    sizes[i] = std::max<double>(rows.size(), 1.0);
    Eigen::VectorXd mu;
    Eigen::MatrixXd cov;
    if (rows.size() >= 2) {
      Eigen::MatrixXd sub(rows.size(), d);
      for (std::size_t r = 0; r < rows.size(); ++r) sub.row(r) = x.row(rows[r]);
      mu = sub.colwise().mean().transpose();
      cov = pooled_covariance(sub);
      cov.diagonal().array() += ridge;
    } else {
      mu = x.row(centers[i]).transpose();
      cov = ridged;
    }
    Eigen::MatrixXd lam;
    Eigen::VectorXd noise;
    principal_loadings(cov, q, &lam, &noise);
    m.means.push_back(std::move(mu));
    m.loadings.push_back(lam);
    m.noise_diag.push_back(noise);
    Eigen::MatrixXd full = lam * lam.transpose();
    full.diagonal() += noise;
    m.covariances.push_back(std::move(full));
  }
  m.weights = sizes / sizes.sum();
  return m;
}

// Re-seeds collapsed components at the points worst explained by the current
// model. This is an intervention, not an EM step, so the caller resets the
// monotone trace afterwards.
void reseed_collapsed(const Eigen::MatrixXd& x, const EStep& es,
                      const std::vector<int>& collapsed, int q,
                      const Eigen::MatrixXd& pooled, double ridge,
                      MixtureModel* m) {
  Eigen::VectorXd worst = es.resp.rowwise().maxCoeff();
  Eigen::MatrixXd ridged = pooled;
  ridged.diagonal().array() += ridge;
  for (int c : collapsed) {
    Eigen::Index j = 0;
    worst.minCoeff(&j);
    worst[j] = std::numeric_limits<double>::infinity();
    m->means[c] = x.row(j).transpose();
    if (m->family == CovarianceFamily::FullCovariance) {
      m->covariances[c] = ridged;
    } else {
      principal_loadings(ridged, q, &m->loadings[c], &m->noise_diag[c]);
      m->covariances[c] = m->loadings[c] * m->loadings[c].transpose();
      m->covariances[c].diagonal() += m->noise_diag[c];
    }
    m->weights[c] = 1.0 / m->k;
  }
  m->weights /= m->weights.sum();
}

void gmm_m_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& resp,
                double ridge, MixtureModel* m) {
  const auto n = static_cast<double>(x.rows());
  const Eigen::VectorXd nk = resp.colwise().sum();
  for (int i = 0; i < m->k; ++i) {
    const Eigen::VectorXd r = resp.col(i);
    const Eigen::VectorXd mu = x.transpose() * r / nk[i];
    const Eigen::MatrixXd centered = x.rowwise() - mu.transpose();
    Eigen::MatrixXd cov =
        centered.transpose() * (centered.array().colwise() * r.array()).matrix() /
        nk[i];
    cov = 0.5 * (cov + cov.transpose()).eval();
    cov.diagonal().array() += ridge;
    m->means[i] = mu;
    m->covariances[i] = cov;
  }
  m->weights = nk / n;
}

void mfa_m_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& resp,
                MixtureModel* m) {
  const auto n = static_cast<double>(x.rows());
  const auto d = x.cols();
  const int q = static_cast<int>(m->loadings[0].cols());

  for (int i = 0; i < m->k; ++i) {
    const Eigen::VectorXd r = resp.col(i);
    const double w = r.sum();
    const Eigen::MatrixXd& lam = m->loadings[i];

    // Posterior factor moments under the current parameters:
    // beta = Lam' Sigma^-1, E[z|x] = beta (x - mu),
    // E[zz'|x] = (I - beta Lam) + E[z]E[z]'.
    Eigen::LLT<Eigen::MatrixXd> sigma(m->covariances[i]);
    if (sigma.info() != Eigen::Success) {
      throw std::runtime_error("factor-analytic covariance not positive definite");
    }
    const Eigen::MatrixXd beta = sigma.solve(lam).transpose();  // q x d
    const Eigen::MatrixXd xc = x.rowwise() - m->means[i].transpose();
    const Eigen::MatrixXd zb = xc * beta.transpose();  // n x q
    const Eigen::MatrixXd rzb = zb.array().colwise() * r.array();
    const Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(q, q) - beta * lam;

    Eigen::MatrixXd sxz(d, q + 1);  // sum_j r_j x_j [z_j; 1]'
    sxz.leftCols(q) = x.transpose() * rzb;
    sxz.col(q) = x.transpose() * r;
    Eigen::MatrixXd szz(q + 1, q + 1);  // sum_j r_j E[[z;1][z;1]']
    szz.topLeftCorner(q, q) = w * psi + zb.transpose() * rzb;
    szz.topRightCorner(q, 1) = rzb.colwise().sum().transpose();
    szz.bottomLeftCorner(1, q) = rzb.colwise().sum();
    szz(q, q) = w;

    const Eigen::MatrixXd lam_mu =
        szz.ldlt().solve(sxz.transpose()).transpose();  // d x (q+1)
    const Eigen::VectorXd sxx_diag =
        (x.array().square().colwise() * r.array()).colwise().sum().matrix().transpose();
    const Eigen::VectorXd cross =
        (lam_mu.array() * sxz.array()).rowwise().sum().matrix();

    m->loadings[i] = lam_mu.leftCols(q);
    m->means[i] = lam_mu.col(q);
    m->noise_diag[i] = ((sxx_diag - cross) / w).cwiseMax(kNoiseFloor);
    m->covariances[i] = m->loadings[i] * m->loadings[i].transpose();
    m->covariances[i].diagonal() += m->noise_diag[i];
    m->weights[i] = w / n;
  }
  m->weights /= m->weights.sum();
}

struct EmOutcome {
  MixtureModel model;
  double loglik = -std::numeric_limits<double>::infinity();
  double max_rowsum_error = 0.0;
};

EmOutcome run_em(const Eigen::MatrixXd& x, MixtureModel model, int q,
                 const Eigen::MatrixXd& pooled, double ridge,
                 const EmConfig& cfg) {
  const auto n = static_cast<double>(x.rows());
  EmOutcome out;
  model.loglik_trace.clear();

  MixtureModel prev = model;
  double prev_ll = -std::numeric_limits<double>::infinity();

  for (int it = 0; it <= cfg.max_iterations; ++it) {
    const EStep es = e_step(x, model, make_densities(model));
    out.max_rowsum_error = std::max(out.max_rowsum_error, es.max_rowsum_error);

    // The M-step covariance ridge is not part of the likelihood, so a step
    // can lose a hair of log-likelihood near a ridged fixed point. Such a
    // step is rejected and the previous parameters stand.
    if (!model.loglik_trace.empty() && es.loglik < prev_ll - 1e-9) {
      model = std::move(prev);
      break;
    }
    model.loglik_trace.push_back(es.loglik);
    if (std::isfinite(prev_ll) && std::abs(es.loglik - prev_ll) / n <= cfg.rel_tolerance) {
      break;
    }
    if (it == cfg.max_iterations) break;

    std::vector<int> collapsed;
    const Eigen::VectorXd nk = es.resp.colwise().sum();
    for (int i = 0; i < model.k; ++i) {
      if (nk[i] < kCollapseFraction * n) collapsed.push_back(i);
    }
    if (!collapsed.empty()) {
      reseed_collapsed(x, es, collapsed, q, pooled, ridge, &model);
      model.loglik_trace.clear();
      prev_ll = -std::numeric_limits<double>::infinity();
      continue;
    }

    prev = model;
    prev_ll = es.loglik;
    if (model.family == CovarianceFamily::FullCovariance) {
      gmm_m_step(x, es.resp, ridge, &model);
    } else {
      mfa_m_step(x, es.resp, &model);
    }
  }

  out.loglik = model.loglik_trace.back();
  out.model = std::move(model);
  return out;
}

void validate_mixture_inputs(const Eigen::MatrixXd& x, int k) {
  if (x.rows() < 2 || x.cols() < 1) {
    throw std::invalid_argument("mixture data must have >= 2 rows and >= 1 column");
  }
  if (!x.allFinite()) throw std::invalid_argument("mixture data contains non-finite values");
  if (k < 1 || k >= x.rows()) {
    throw std::invalid_argument("component count must be in [1, n-1]");
  }
}

void validate_init(const MixtureModel& init, const Eigen::MatrixXd& x, int k,
                   CovarianceFamily family) {
  if (init.k != k || init.family != family ||
      static_cast<int>(init.means.size()) != k ||
      static_cast<int>(init.covariances.size()) != k ||
      init.weights.size() != k) {
    throw std::invalid_argument("initial model does not match requested mixture");
  }
  for (const auto& mu : init.means) {
    if (mu.size() != x.cols()) {
      throw std::invalid_argument("initial model dimension does not match data");
    }
  }
}

MixtureModel fit_mixture(const Eigen::MatrixXd& x, int k, CovarianceFamily family,
                         int q, const EmConfig& cfg,
                         const std::optional<MixtureModel>& init) {
  validate_mixture_inputs(x, k);
  if (family == CovarianceFamily::FactorAnalytic && (q < 1 || q >= x.cols())) {
    throw std::invalid_argument("factor count must be in [1, d-1]");
  }
  if (init) validate_init(*init, x, k, family);

  const Eigen::MatrixXd pooled = pooled_covariance(x);
  const double ridge =
      cfg.covariance_ridge_scale * pooled.trace() / static_cast<double>(x.cols());

  std::mt19937_64 rng(cfg.seed);
  const int restarts = init ? 1 : std::max(1, cfg.n_restarts);
  EmOutcome best;
  double worst_rowsum = 0.0;
  for (int r = 0; r < restarts; ++r) {
    MixtureModel start =
        init ? *init : seed_model(x, k, family, q, pooled, ridge, rng);
    EmOutcome run = run_em(x, std::move(start), q, pooled, ridge, cfg);
    worst_rowsum = std::max(worst_rowsum, run.max_rowsum_error);
    if (run.loglik > best.loglik) best = std::move(run);
  }
  best.model.max_resp_rowsum_error = worst_rowsum;
  return std::move(best.model);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double mixture_log_density(const MixtureModel& model, const Eigen::VectorXd& x) {
  const auto dens = make_densities(model);
  double top = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd lp(model.k);
  for (int i = 0; i < model.k; ++i) {
    lp[i] = std::log(model.weights[i]) + dens[i].log_density(x);
    top = std::max(top, lp[i]);
  }
  return top + std::log((lp.array() - top).exp().sum());
}

MixtureModel em_fit_gmm(const Eigen::MatrixXd& x, int k, const EmConfig& cfg,
                        const std::optional<MixtureModel>& init) {
  return fit_mixture(x, k, CovarianceFamily::FullCovariance, 0, cfg, init);
}

MixtureModel em_fit_mfa(const Eigen::MatrixXd& x, int k, int q,
                        const EmConfig& cfg,
                        const std::optional<MixtureModel>& init) {
  return fit_mixture(x, k, CovarianceFamily::FactorAnalytic, q, cfg, init);
}

std::vector<int> cluster_assign(const MixtureModel& model, const Eigen::MatrixXd& x) {
  if (model.k < 1) throw std::invalid_argument("model has no components");
  if (!model.means.empty() && x.cols() != model.means[0].size()) {
    throw std::invalid_argument("data dimension does not match model");
  }
  const auto dens = make_densities(model);
  std::vector<int> labels(x.rows());
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    int best = 0;
    double best_lp = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < model.k; ++i) {
      const double lp =
          std::log(model.weights[i]) + dens[i].log_density(x.row(j).transpose());
      if (lp > best_lp) {
        best_lp = lp;
        best = i;
      }
    }
    labels[j] = best;
  }
  return labels;
}

EncodedMixtureFit encoded_mixture_fit(const Eigen::MatrixXd& x,
                                      const FeatureEncoder& enc, int k,
                                      CovarianceFamily family, const EmConfig& cfg,
                                      int q_factors) {
  if (x.cols() != enc.source_dim) {
    throw std::invalid_argument("encoder was built for a different feature count");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::MatrixXd x_enc = encode_features(enc, x);
  EncodedMixtureFit fit;
  fit.model = family == CovarianceFamily::FullCovariance
                  ? em_fit_gmm(x_enc, k, cfg)
                  : em_fit_mfa(x_enc, k, q_factors, cfg);
  fit.runtime_seconds = seconds_since(t0);
  fit.encoder = enc;
  const Eigen::MatrixXd& b = enc.matrix_b;
  for (int i = 0; i < k; ++i) {
    fit.decoded_means.push_back(b * fit.model.means[i]);
    Eigen::MatrixXd cov = b * fit.model.covariances[i] * b.transpose();
    fit.decoded_covariances.push_back(0.5 * (cov + cov.transpose()));
  }
  return fit;
}

EncodedMixtureFit encoded_mixture_fit(const Eigen::MatrixXd& x, int target_dim,
                                      int k, CovarianceFamily family,
                                      const EmConfig& cfg, int q_factors) {
  const auto t0 = std::chrono::steady_clock::now();
  FeatureEncoder enc = fit_feature_encoder(x, target_dim);
  const double build_seconds = seconds_since(t0);
  EncodedMixtureFit fit = encoded_mixture_fit(x, enc, k, family, cfg, q_factors);
  if (cfg.time_encoder_construction) fit.runtime_seconds += build_seconds;
  return fit;
}

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  }
  return rows;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (j.empty()) throw std::runtime_error("empty matrix in model JSON");
  Eigen::MatrixXd m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != static_cast<std::size_t>(m.cols())) {
      throw std::runtime_error("ragged matrix in model JSON");
    }
    for (std::size_t c = 0; c < j[i].size(); ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

}  // namespace

std::string mixture_model_to_json(const MixtureModel& model) {
  nlohmann::json j;
  j["k"] = model.k;
  j["family"] = model.family == CovarianceFamily::FullCovariance
                    ? "full-covariance"
                    : "factor-analytic";
  j["weights"] = vector_to_json(model.weights);
  nlohmann::json means = nlohmann::json::array();
  for (const auto& mu : model.means) means.push_back(vector_to_json(mu));
  j["means"] = means;
  if (model.family == CovarianceFamily::FullCovariance) {
    nlohmann::json covs = nlohmann::json::array();
    for (const auto& c : model.covariances) covs.push_back(matrix_to_json(c));
    j["covariances"] = covs;
  } else {
    nlohmann::json loads = nlohmann::json::array();
    for (const auto& l : model.loadings) loads.push_back(matrix_to_json(l));
    j["loadings"] = loads;
    nlohmann::json noise = nlohmann::json::array();
    for (const auto& nd : model.noise_diag) noise.push_back(vector_to_json(nd));
    j["noise_diag"] = noise;
  }
  j["loglik"] = model.loglik_trace.empty() ? 0.0 : model.loglik_trace.back();
  return j.dump(2);
}

MixtureModel mixture_model_from_json(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  MixtureModel m;
  m.k = j.at("k").get<int>();
  const std::string family = j.at("family").get<std::string>();
  if (family == "full-covariance") {
    m.family = CovarianceFamily::FullCovariance;
  } else if (family == "factor-analytic") {
    m.family = CovarianceFamily::FactorAnalytic;
  } else {
    throw std::runtime_error("unknown mixture family: " + family);
  }
  m.weights = vector_from_json(j.at("weights"));
  for (const auto& mu : j.at("means")) m.means.push_back(vector_from_json(mu));
  if (m.family == CovarianceFamily::FullCovariance) {
    for (const auto& c : j.at("covariances")) {
      m.covariances.push_back(matrix_from_json(c));
    }
  } else {
    for (const auto& l : j.at("loadings")) m.loadings.push_back(matrix_from_json(l));
    for (const auto& nd : j.at("noise_diag")) {
      m.noise_diag.push_back(vector_from_json(nd));
    }
    for (int i = 0; i < m.k; ++i) {
      Eigen::MatrixXd cov = m.loadings[i] * m.loadings[i].transpose();
      cov.diagonal() += m.noise_diag[i];
      m.covariances.push_back(std::move(cov));
    }
  }
  if (static_cast<int>(m.means.size()) != m.k ||
      static_cast<int>(m.covariances.size()) != m.k || m.weights.size() != m.k) {
    throw std::runtime_error("inconsistent component counts in model JSON");
  }
  m.loglik_trace.push_back(j.at("loglik").get<double>());
  return m;
}

}  // namespace encore
