#pragma once

#include <Eigen/Dense>

namespace encore {

/// Genetic relationship matrix. Construction validates the invariants every
/// downstream routine relies on: square, symmetric to 1e-8, and positive
/// semidefinite up to a -1e-6 * max|g| eigenvalue tolerance. The stored copy
/// is symmetrized exactly.
class GrmMatrix {
 public:
  explicit GrmMatrix(Eigen::MatrixXd g);

  const Eigen::MatrixXd& matrix() const { return g_; }
  int n_samples() const { return static_cast<int>(g_.rows()); }

 private:
  Eigen::MatrixXd g_;
};

}  // namespace encore
