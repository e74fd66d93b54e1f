#include "sparsecov/matcore.hpp"

#include <cmath>
#include <sstream>

namespace sparsecov {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

Matrix cholesky_lower(const Matrix& a, Index& failed_at) {
  const Index p = a.rows();
  Matrix l = Matrix::Zero(p, p);
  failed_at = -1;
  for (Index j = 0; j < p; ++j) {
    const double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) {
      failed_at = j;
      return l;
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    const Index rest = p - j - 1;
    if (rest > 0) {
      l.col(j).tail(rest) =
          (a.col(j).tail(rest) - l.bottomLeftCorner(rest, j) * l.row(j).head(j).transpose()) /
          ljj;
    }
  }
  return l;
}

}  // namespace

NotPositiveDefinite::NotPositiveDefinite(Index pivot, const std::string& what)
    : std::runtime_error(what.empty()
                             ? "matrix is not positive definite (pivot " + std::to_string(pivot) + ")"
                             : what),
      pivot_(pivot) {}

SymmetricMatrix::SymmetricMatrix(Matrix entries) {
  if (entries.rows() != entries.cols()) {
    std::ostringstream os;
    os << "symmetric matrix must be square, got " << entries.rows() << "x" << entries.cols();
    throw std::invalid_argument(os.str());
  }
  if (entries.rows() == 0) throw std::invalid_argument("symmetric matrix must have p >= 1");
  require_finite(entries, "symmetric matrix");
  const double scale = entries.cwiseAbs().maxCoeff();
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    std::ostringstream os;
    os << "matrix is not symmetric (max |M - M^T| = " << asym << ")";
    throw std::invalid_argument(os.str());
  }
  m_ = 0.5 * (entries + entries.transpose());
}

SymmetricMatrix SymmetricMatrix::symmetrized(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("symmetrized: matrix must be square and non-empty");
  require_finite(m, "symmetrized");
  return {Matrix(0.5 * (m + m.transpose())), Trusted{}};
}

SymmetricMatrix SymmetricMatrix::identity(Index p) {
  if (p < 1) throw std::invalid_argument("identity: p must be >= 1");
  return {Matrix::Identity(p, p), Trusted{}};
}

SymmetricMatrix SymmetricMatrix::zero(Index p) {
  if (p < 1) throw std::invalid_argument("zero: p must be >= 1");
  return {Matrix::Zero(p, p), Trusted{}};
}

SymmetricMatrix SymmetricMatrix::diagonal(const Vector& d) {
  if (d.size() < 1) throw std::invalid_argument("diagonal: empty vector");
  require_finite(d, "diagonal");
  return {Matrix(d.asDiagonal()), Trusted{}};
}

SymmetricMatrix SymmetricMatrix::diagonal_part() const {
  return {Matrix(m_.diagonal().asDiagonal()), Trusted{}};
}

SymmetricMatrix operator+(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  return {Matrix(a.m_ + b.m_), SymmetricMatrix::Trusted{}};
}

SymmetricMatrix operator-(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  return {Matrix(a.m_ - b.m_), SymmetricMatrix::Trusted{}};
}

SymmetricMatrix operator*(double s, const SymmetricMatrix& a) {
  return {Matrix(s * a.m_), SymmetricMatrix::Trusted{}};
}

double CholeskyFactor::log_det() const {
  return 2.0 * lower_.diagonal().array().log().sum();
}

Matrix CholeskyFactor::solve_lower(const Matrix& b) const {
  return lower_.triangularView<Eigen::Lower>().solve(b);
}

Matrix CholeskyFactor::solve(const Matrix& b) const {
  const Matrix y = solve_lower(b);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

SymmetricMatrix CholeskyFactor::inverse() const {
  const Matrix linv = solve_lower(Matrix::Identity(dim(), dim()));
  return SymmetricMatrix::symmetrized(linv.transpose() * linv);
}

Matrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

SymmetricMatrix sample_covariance(const Matrix& data, bool center) {
  if (data.rows() < 1 || data.cols() < 1)
    throw std::invalid_argument("sample_covariance: empty data");
  require_finite(data, "sample_covariance");
  const double n = static_cast<double>(data.rows());
  if (center) {
    const Matrix centered = data.rowwise() - data.colwise().mean();
    return SymmetricMatrix::symmetrized(centered.transpose() * centered / n);
  }
  return SymmetricMatrix::symmetrized(data.transpose() * data / n);
}

CholeskyFactor cholesky(const SymmetricMatrix& m) {
  Index failed = -1;
  Matrix l = cholesky_lower(m.matrix(), failed);
  if (failed >= 0) throw NotPositiveDefinite(failed);
  return CholeskyFactor(std::move(l));
}

Index failing_pivot(const SymmetricMatrix& m) {
  Index failed = -1;
  cholesky_lower(m.matrix(), failed);
  return failed;
}

bool is_positive_definite(const SymmetricMatrix& m) { return failing_pivot(m) < 0; }

double log_det_pd(const SymmetricMatrix& m) { return cholesky(m).log_det(); }

SymmetricMatrix inverse_pd(const SymmetricMatrix& m) { return cholesky(m).inverse(); }

SpectralDecomposition spectral_decompose(const SymmetricMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw NumericalError("spectral_decompose: eigensolver failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace sparsecov
