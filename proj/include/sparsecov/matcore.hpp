#pragma once

// Dense symmetric matrix primitives used by every other module.

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace sparsecov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when a Cholesky pivot is not strictly positive.
class NotPositiveDefinite : public std::runtime_error {
 public:
  explicit NotPositiveDefinite(Index pivot, const std::string& what = {});
  /// Zero-based index of the first failing pivot.
  Index pivot() const noexcept { return pivot_; }

 private:
  Index pivot_;
};

/// Numerical failure that is not a user error (e.g. eigensolver breakdown).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense p x p real symmetric matrix with finite entries.
///
/// Symmetry is exact: entry (i,j) and (j,i) hold the same double. The
/// validating constructor accepts input whose asymmetry is at most 1e-12
/// relative to the largest entry and averages it away; anything larger is
/// rejected with std::invalid_argument.
class SymmetricMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-12;

  SymmetricMatrix() = default;
  explicit SymmetricMatrix(Matrix entries);

  /// Averages (M + M^T)/2 without the asymmetry check. For matrices that are
  /// symmetric in exact arithmetic but were produced by floating-point products.
  static SymmetricMatrix symmetrized(const Matrix& m);

  static SymmetricMatrix identity(Index p);
  static SymmetricMatrix zero(Index p);
  static SymmetricMatrix diagonal(const Vector& d);

  Index dim() const noexcept { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }
  Vector diagonal() const { return m_.diagonal(); }
  /// Diagonal part only, off-diagonal zeroed.
  SymmetricMatrix diagonal_part() const;

  double frobenius_norm() const { return m_.norm(); }
  double max_abs() const { return m_.cwiseAbs().maxCoeff(); }
  double trace() const { return m_.trace(); }

  friend SymmetricMatrix operator+(const SymmetricMatrix& a, const SymmetricMatrix& b);
  friend SymmetricMatrix operator-(const SymmetricMatrix& a, const SymmetricMatrix& b);
  friend SymmetricMatrix operator*(double s, const SymmetricMatrix& a);

  friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  struct Trusted {};
  SymmetricMatrix(Matrix m, Trusted) : m_(std::move(m)) {}

  Matrix m_;
};

/// Lower-triangular factor L with L L^T = M.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(Matrix lower) : lower_(std::move(lower)) {}

  const Matrix& lower() const noexcept { return lower_; }
  Index dim() const noexcept { return lower_.rows(); }

  double log_det() const;
  /// Solves M X = B.
  Matrix solve(const Matrix& b) const;
  SymmetricMatrix inverse() const;
  /// L^{-1} B.
  Matrix solve_lower(const Matrix& b) const;

 private:
  Matrix lower_;
};

/// Eigenvalues ascending; eigenvectors are the columns of an orthogonal matrix.
struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;

  Matrix reconstruct() const;
};

/// S = X^T X / n, with optional column centering (the divisor stays n).
SymmetricMatrix sample_covariance(const Matrix& data, bool center = false);

/// Throws NotPositiveDefinite carrying the failing pivot.
CholeskyFactor cholesky(const SymmetricMatrix& m);

/// The repository-wide positive definiteness predicate: Cholesky succeeds.
bool is_positive_definite(const SymmetricMatrix& m);

/// Index of the first non-positive pivot, or -1 when m is positive definite.
Index failing_pivot(const SymmetricMatrix& m);

double log_det_pd(const SymmetricMatrix& m);
SymmetricMatrix inverse_pd(const SymmetricMatrix& m);

SpectralDecomposition spectral_decompose(const SymmetricMatrix& m);

}  // namespace sparsecov
