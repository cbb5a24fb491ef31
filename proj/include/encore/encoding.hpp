#pragma once

#include <Eigen/Dense>
#include <string>

#include "encore/grm.hpp"

namespace encore {

/// Maps n samples to m pseudo-samples. Rows of `matrix_a` are orthonormal,
/// so the encoded relationship matrix A G A^T keeps the top-m spectrum of G
/// and the encoded residual covariance stays the identity.
struct SampleEncoder {
  Eigen::MatrixXd matrix_a;  // m x n
  int source_rank = 0;       // n
  int target_rank = 0;       // m
  // Eigenvalues matching the rows, descending. Filled by fit_sample_encoder;
  // empty on encoders loaded from disk.
  Eigen::VectorXd spectrum;
};

/// Maps p features to r encoded features. Columns of `matrix_b` are
/// orthonormal directions of largest variance in the training data.
struct FeatureEncoder {
  Eigen::MatrixXd matrix_b;  // p x r
  int source_dim = 0;        // p
  int target_dim = 0;        // r
};

/// Builds the sample encoder from the top-`target_rank` eigenvectors of g.
/// Rows are ordered by descending eigenvalue; each eigenvector is sign-fixed
/// so its first non-negligible entry is positive.
SampleEncoder fit_sample_encoder(const GrmMatrix& g, int target_rank);

/// Builds the feature encoder from the top-`target_dim` right singular
/// vectors of the column-centered data matrix (rows are observations).
/// The same sign convention as the sample encoder applies per column.
FeatureEncoder fit_feature_encoder(const Eigen::MatrixXd& x, int target_dim);

/// x is n x p with samples in rows; returns A x (m x p).
Eigen::MatrixXd encode_samples(const SampleEncoder& enc, const Eigen::MatrixXd& x);

/// x is n x p with features in columns; returns x B (n x r).
Eigen::MatrixXd encode_features(const FeatureEncoder& enc, const Eigen::MatrixXd& x);

/// Maps encoded rows back to the original feature space: x_enc B^T (n x p).
/// decode(encode(x)) is the orthogonal projection of x onto the span of B.
Eigen::MatrixXd decode_features(const FeatureEncoder& enc, const Eigen::MatrixXd& x_enc);

void save_sample_encoder(const SampleEncoder& enc, const std::string& path);
void save_feature_encoder(const FeatureEncoder& enc, const std::string& path);
SampleEncoder load_sample_encoder(const std::string& path);
FeatureEncoder load_feature_encoder(const std::string& path);

}  // namespace encore
