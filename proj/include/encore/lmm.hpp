#pragma once

#include <Eigen/Dense>
#include <vector>

#include "encore/encoding.hpp"
#include "encore/grm.hpp"

namespace encore {

struct VarianceComponents {
  double sigma_g = 0.0;  // genetic variance, >= 0
  double sigma_e = 0.0;  // residual variance, > 0
};

/// One phenotype with its fixed-effect design and relationship matrix.
/// y is n x 1, x is n x q with q < n and full column rank.
struct LmmInputs {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  GrmMatrix g;
};

struct FitConfig {
  int max_iterations = 200;
  double rel_tolerance = 1e-6;    // on the score, scaled by 1 + |loglik|
  double variance_floor = 1e-8;
  // Applies to the (inputs, target_rank) overload of encoded_reml_fit:
  // whether encoder construction counts toward runtime_seconds.
  bool time_encoder_construction = true;
};

struct LmmFit {
  VarianceComponents vc;
  Eigen::VectorXd beta_fixed;
  double h2 = 0.0;
  double reml_loglik = 0.0;
  std::vector<double> loglik_trace;  // one entry per accepted iteration
  int n_iterations = 0;
  bool converged = false;
  double runtime_seconds = 0.0;
};

/// h2 = sigma_g / (sigma_g + sigma_e); 0 when both are at or below the floor.
double heritability(const VarianceComponents& vc, double variance_floor = 1e-8);
double heritability(const LmmFit& fit);

/// Restricted log-likelihood of (sigma_g, sigma_e) under
/// y ~ N(x beta, sigma_g G + sigma_e I), with beta profiled out:
/// -0.5 * (log|V| + log|X' V^-1 X| + y' P y).
double reml_loglik(const LmmInputs& inputs, const VarianceComponents& vc);

/// Gradient of reml_loglik in (sigma_g, sigma_e):
/// s_i = -0.5 * (tr(P A_i) - y' P A_i P y) with A_1 = G, A_2 = I.
Eigen::Vector2d reml_score(const LmmInputs& inputs, const VarianceComponents& vc);

/// Average-information REML. Newton steps on the two variance components,
/// halving the step when it would decrease the objective; components are
/// clamped at cfg.variance_floor. Accepted iterations never decrease the
/// objective by more than 1e-10.
LmmFit reml_fit(const LmmInputs& inputs, const FitConfig& cfg = {});

/// Fits in the encoded space: y' = A y, X' = A X, G' = A G A'. The encoded
/// residual covariance is again the identity because A has orthonormal rows.
/// runtime_seconds covers encoding plus fitting.
LmmFit encoded_reml_fit(const LmmInputs& inputs, const SampleEncoder& enc,
                        const FitConfig& cfg = {});

/// Builds the encoder from inputs.g, then fits as above. Encoder
/// construction counts toward runtime_seconds when
/// cfg.time_encoder_construction is set.
LmmFit encoded_reml_fit(const LmmInputs& inputs, int target_rank,
                        const FitConfig& cfg = {});

}  // namespace encore
