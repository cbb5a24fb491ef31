#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "encore/encoding.hpp"

namespace encore {

enum class CovarianceFamily { FullCovariance, FactorAnalytic };

struct EmConfig {
  int max_iterations = 500;
  double rel_tolerance = 1e-8;  // on the per-sample log-likelihood change
  // Ridge added to every M-step covariance: scale * trace(S)/d with S the
  // pooled sample covariance of the training data.
  double covariance_ridge_scale = 1e-6;
  int n_restarts = 10;
  std::uint64_t seed = 0;
  // Applies to the (x, target_dim, ...) overload of encoded_mixture_fit:
  // whether encoder construction counts toward runtime_seconds.
  bool time_encoder_construction = true;
};

/// Gaussian mixture. For the factor-analytic family, covariances[i] always
/// equals loadings[i] loadings[i]' + diag(noise_diag[i]).
struct MixtureModel {
  int k = 0;
  CovarianceFamily family = CovarianceFamily::FullCovariance;
  Eigen::VectorXd weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
  std::vector<Eigen::MatrixXd> loadings;      // factor-analytic only, d x q
  std::vector<Eigen::VectorXd> noise_diag;    // factor-analytic only
  // Log-likelihood after the initial point and each accepted iteration of
  // the winning restart; reset when a collapsed component is re-seeded.
  std::vector<double> loglik_trace;
  double max_resp_rowsum_error = 0.0;  // diagnostic, worst |row sum - 1|
};

/// Log of the mixture density at x. Singular covariances are handled through
/// the spectral pseudo-inverse, so models decoded from an encoded space keep
/// finite density values on their support.
double mixture_log_density(const MixtureModel& model, const Eigen::VectorXd& x);

/// EM for a full-covariance Gaussian mixture. Restarts are seeded from
/// cfg.seed with k-means++-style center selection; the best final
/// log-likelihood wins. A component whose responsibility mass collapses is
/// re-seeded at the point worst explained by the current model. `init`
/// replaces the seeding when given (n_restarts is ignored then).
MixtureModel em_fit_gmm(const Eigen::MatrixXd& x, int k, const EmConfig& cfg = {},
                        const std::optional<MixtureModel>& init = std::nullopt);

/// EM for a mixture of factor analyzers with q factors per component.
/// Loadings are initialized from the top-q principal directions of each
/// seeded cluster; the exact M-step keeps the likelihood non-decreasing.
MixtureModel em_fit_mfa(const Eigen::MatrixXd& x, int k, int q,
                        const EmConfig& cfg = {},
                        const std::optional<MixtureModel>& init = std::nullopt);

/// Most likely component per row: argmax_i log w_i + log N(x | mu_i, S_i),
/// lowest index on ties.
std::vector<int> cluster_assign(const MixtureModel& model, const Eigen::MatrixXd& x);

struct EncodedMixtureFit {
  FeatureEncoder encoder;
  MixtureModel model;  // fitted in the encoded space
  // Parameters mapped back to the original feature space: B mu_i and
  // B S_i B' (rank-deficient when target_dim < source_dim).
  std::vector<Eigen::VectorXd> decoded_means;
  std::vector<Eigen::MatrixXd> decoded_covariances;
  double runtime_seconds = 0.0;  // encoding plus fitting
};

/// Fits the mixture on x B. q_factors is only read for the factor-analytic
/// family.
EncodedMixtureFit encoded_mixture_fit(const Eigen::MatrixXd& x,
                                      const FeatureEncoder& enc, int k,
                                      CovarianceFamily family,
                                      const EmConfig& cfg = {}, int q_factors = 1);

/// Builds the feature encoder from x, then fits as above. Encoder
/// construction counts toward runtime_seconds when
/// cfg.time_encoder_construction is set.
EncodedMixtureFit encoded_mixture_fit(const Eigen::MatrixXd& x, int target_dim,
                                      int k, CovarianceFamily family,
                                      const EmConfig& cfg = {}, int q_factors = 1);

/// JSON round trip for fitted models. Full-covariance models serialize
/// covariances; factor-analytic models serialize loadings and noise_diag.
std::string mixture_model_to_json(const MixtureModel& model);
MixtureModel mixture_model_from_json(const std::string& json_text);

}  // namespace encore
