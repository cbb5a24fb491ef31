#include "encore/encoding.hpp"

#include <lapacke.h>

#include <Eigen/SVD>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "encore/matrix_io.hpp"

extern "C" void openblas_set_num_threads(int num_threads);

namespace encore {

namespace {

constexpr const char* kSampleMethod = "svd-of-grm";
constexpr const char* kFeatureMethod = "svd-of-data";

// Flips v so its first entry with |v_i| > 1e-12 is positive. Eigenvector and
// singular-vector signs are otherwise solver-dependent.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

void check_orthonormal(const Eigen::MatrixXd& vectors, const std::string& what) {
  Eigen::MatrixXd gram = vectors.transpose() * vectors;
  gram.diagonal().array() -= 1.0;
  if (gram.cwiseAbs().maxCoeff() > 1e-8) {
    throw std::runtime_error(what + ": vectors are not orthonormal");
  }
}

}  // namespace

namespace {

// Top-m eigenpairs via dsyevr, which computes only the wanted range; a full
// symmetric eigendecomposition would dominate the cost of the encoded fit.
SampleEncoder eigenpairs_dense(const GrmMatrix& g, int m) {
  const int n = g.n_samples();
  openblas_set_num_threads(1);
  Eigen::MatrixXd a = g.matrix();  // destroyed by the solver
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, m);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(m));
  lapack_int found = 0;
  const double abstol = LAPACKE_dlamch('S');
  lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0,
      n - m + 1, n, abstol, &found, w.data(), z.data(), n, isuppz.data());
  if (info != 0 || found != m) {
    throw std::runtime_error("symmetric eigensolver failed on relationship matrix");
  }

  // Eigenvalues arrive ascending; rows of A are ordered by descending one.
  SampleEncoder enc;
  enc.source_rank = n;
  enc.target_rank = m;
  enc.matrix_a.resize(m, n);
  enc.spectrum.resize(m);
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd v = z.col(m - 1 - j);
    fix_sign(v);
    enc.matrix_a.row(j) = v.transpose();
    enc.spectrum[j] = w[m - 1 - j];
  }
  return enc;
}

// Top-m eigenpairs of a low-rank G through its pivoted Cholesky factor
// B (n x k, G = B B'): the nonzero spectrum of G equals that of the small
// B' B, with eigenvectors B w / sqrt(lambda). Rows beyond the numerical rank
// are an orthonormal completion, eigenvalue zero.
SampleEncoder eigenpairs_factored(const Eigen::MatrixXd& b, int n, int m) {
  const int k = static_cast<int>(b.cols());
  if (k == 0) {
    // Numerically zero matrix: any orthonormal rows are eigenvectors.
    SampleEncoder enc;
    enc.source_rank = n;
    enc.target_rank = m;
    enc.matrix_a = Eigen::MatrixXd::Identity(m, n);
    enc.spectrum = Eigen::VectorXd::Zero(m);
    return enc;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(b.transpose() * b);
  if (small.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolver failed on relationship matrix");
  }
  const Eigen::VectorXd vals = small.eigenvalues().reverse();
  const double tol =
      std::max(vals[0], 0.0) * 1e-12 * static_cast<double>(n);

  SampleEncoder enc;
  enc.source_rank = n;
  enc.target_rank = m;
  enc.matrix_a.resize(m, n);
  enc.spectrum = Eigen::VectorXd::Zero(m);
  int kept = 0;
  for (int j = 0; j < std::min(m, k) && vals[j] > tol; ++j) {
    Eigen::VectorXd u = b * small.eigenvectors().col(k - 1 - j) / std::sqrt(vals[j]);
    fix_sign(u);
    enc.matrix_a.row(j) = u.transpose();
    enc.spectrum[j] = vals[j];
    kept = j + 1;
  }
  if (kept == 0) {
    enc.matrix_a = Eigen::MatrixXd::Identity(m, n);
  } else if (kept < m) {
    // Householder-complete the null rows: columns kept..m-1 of the Q factor
    // of the kept eigenvectors are orthonormal and orthogonal to them.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(
        enc.matrix_a.topRows(kept).transpose());
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
    for (int j = kept; j < m; ++j) {
      Eigen::VectorXd u = q.col(j);
      fix_sign(u);
      enc.matrix_a.row(j) = u.transpose();
    }
  }
  return enc;
}

}  // namespace

SampleEncoder fit_sample_encoder(const GrmMatrix& g, int target_rank) {
  const int n = g.n_samples();
  if (target_rank < 1 || target_rank > n) {
    throw std::invalid_argument("sample encoder rank must be in [1, n]");
  }

  // Relationship matrices built from few markers are far from full rank;
  // a pivoted Cholesky reveals that cheaply, and the factored eigenproblem
  // is then much smaller than the dense one.
  Eigen::MatrixXd chol = g.matrix();
  std::vector<lapack_int> piv(n);
  lapack_int rank = 0;
  const lapack_int info = LAPACKE_dpstrf(LAPACK_COL_MAJOR, 'L', n, chol.data(),
                                         n, piv.data(), &rank, -1.0);
  if (info >= 0 && rank <= n / 2) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, rank);
    for (int j = 0; j < rank; ++j)
      for (int i = j; i < n; ++i) b(piv[i] - 1, j) = chol(i, j);
    return eigenpairs_factored(b, n, target_rank);
  }
  return eigenpairs_dense(g, target_rank);
}

FeatureEncoder fit_feature_encoder(const Eigen::MatrixXd& x, int target_dim) {
  if (x.rows() < 2) throw std::invalid_argument("feature encoder needs at least 2 rows");
  const int p = static_cast<int>(x.cols());
  if (target_dim < 1 || target_dim > p) {
    throw std::invalid_argument("feature encoder dimension must be in [1, p]");
  }
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeFullV);

  FeatureEncoder enc;
  enc.source_dim = p;
  enc.target_dim = target_dim;
  enc.matrix_b = svd.matrixV().leftCols(target_dim);
  for (int j = 0; j < target_dim; ++j) fix_sign(enc.matrix_b.col(j));
  return enc;
}

Eigen::MatrixXd encode_samples(const SampleEncoder& enc, const Eigen::MatrixXd& x) {
  if (x.rows() != enc.source_rank) {
    throw std::invalid_argument("encode_samples: row count does not match encoder");
  }
  return enc.matrix_a * x;
}

Eigen::MatrixXd encode_features(const FeatureEncoder& enc, const Eigen::MatrixXd& x) {
  if (x.cols() != enc.source_dim) {
    throw std::invalid_argument("encode_features: column count does not match encoder");
  }
  return x * enc.matrix_b;
}

Eigen::MatrixXd decode_features(const FeatureEncoder& enc, const Eigen::MatrixXd& x_enc) {
  if (x_enc.cols() != enc.target_dim) {
    throw std::invalid_argument("decode_features: column count does not match encoder");
  }
  return x_enc * enc.matrix_b.transpose();
}

namespace {

void save_encoder_matrix(const Eigen::MatrixXd& m, int dim1, int dim2,
                         const char* method, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# encoder " << dim1 << ' ' << dim2 << ' ' << method << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

struct EncoderHeader {
  int dim1 = 0;
  int dim2 = 0;
  std::string method;
};

EncoderHeader read_encoder_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty encoder file " + path);
  std::istringstream hs(line);
  std::string hash, tag;
  EncoderHeader h;
  if (!(hs >> hash >> tag >> h.dim1 >> h.dim2 >> h.method) || hash != "#" ||
      tag != "encoder" || h.dim1 < 1 || h.dim2 < 1) {
    throw std::runtime_error("bad encoder header in " + path);
  }
  return h;
}

}  // namespace

void save_sample_encoder(const SampleEncoder& enc, const std::string& path) {
  save_encoder_matrix(enc.matrix_a, enc.target_rank, enc.source_rank,
                      kSampleMethod, path);
}

void save_feature_encoder(const FeatureEncoder& enc, const std::string& path) {
  save_encoder_matrix(enc.matrix_b, enc.source_dim, enc.target_dim,
                      kFeatureMethod, path);
}

SampleEncoder load_sample_encoder(const std::string& path) {
  EncoderHeader h = read_encoder_header(path);
  if (h.method != kSampleMethod) {
    throw std::runtime_error(path + ": not a sample encoder (method " + h.method + ")");
  }
  SampleEncoder enc;
  enc.target_rank = h.dim1;
  enc.source_rank = h.dim2;
  enc.matrix_a = read_matrix_csv(path);
  if (enc.matrix_a.rows() != h.dim1 || enc.matrix_a.cols() != h.dim2) {
    throw std::runtime_error(path + ": encoder dimensions do not match header");
  }
  check_orthonormal(enc.matrix_a.transpose(), path);
  return enc;
}

FeatureEncoder load_feature_encoder(const std::string& path) {
  EncoderHeader h = read_encoder_header(path);
  if (h.method != kFeatureMethod) {
    throw std::runtime_error(path + ": not a feature encoder (method " + h.method + ")");
  }
  FeatureEncoder enc;
  enc.source_dim = h.dim1;
  enc.target_dim = h.dim2;
  enc.matrix_b = read_matrix_csv(path);
  if (enc.matrix_b.rows() != h.dim1 || enc.matrix_b.cols() != h.dim2) {
    throw std::runtime_error(path + ": encoder dimensions do not match header");
  }
  check_orthonormal(enc.matrix_b, path);
  return enc;
}

}  // namespace encore
