#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "encore/grm.hpp"

namespace encore {

struct SimulationSpec {
  int n_samples = 0;
  int n_snps = 0;
  double h2_true = 0.0;  // in [0, 1]
  std::uint64_t seed = 0;
};

/// Simulated phenotype with its standardized genotype matrix and GRM.
struct HeritabilitySim {
  Eigen::VectorXd phenotype;  // n
  Eigen::MatrixXd genotypes;  // n x p, columns standardized (or all-zero)
  GrmMatrix grm;              // Z Z' / p
};

/// Draws genotypes as Binomial(2, 0.5) counts, standardizes columns to mean
/// zero and unit sample variance (monomorphic columns become zero), then
/// y = Z lambda + e with lambda ~ N(0, h2/p) and e ~ N(0, 1 - h2) entrywise.
/// Identical spec gives an identical draw. Throws when every column is
/// monomorphic.
HeritabilitySim simulate_heritability_data(const SimulationSpec& spec);

struct LabeledDataset {
  Eigen::MatrixXd x;        // n x p feature matrix
  std::vector<int> labels;  // class codes 0..n_classes-1, by first appearance
  int n_classes = 0;
  std::string name;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
};

/// Loads a headered CSV whose `label_column` holds class labels and whose
/// remaining columns are numeric features. With standardize set, feature
/// columns are z-scored (constant columns become zero).
LabeledDataset load_labeled_csv(const std::string& path,
                                const std::string& label_column,
                                bool standardize);

/// Fraction of points whose predicted cluster maps to their true class under
/// the best injective mapping from predicted clusters to classes.
double clustering_accuracy(const std::vector<int>& predicted,
                           const std::vector<int>& truth);

/// Adjusted Rand index between two labelings of the same points. By
/// convention returns 1 when both partitions carry no pair information.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace encore
