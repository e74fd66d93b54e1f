#include "sparsecov/sylvester.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "sparsecov/kernels.hpp"

namespace sparsecov::sylvester {

namespace {

void validate(const SurrogateSystem& sys) {
  if (!(sys.rho > 0.0) || !std::isfinite(sys.rho))
    throw std::invalid_argument("surrogate system: rho must be positive and finite");
  if (sys.sigma_k.dim() != sys.c_k.dim())
    throw std::invalid_argument("surrogate system: sigma_k and c_k dimensions differ");
  const Index pivot = failing_pivot(sys.sigma_k);
  if (pivot >= 0) throw NotPositiveDefinite(pivot, "surrogate system: sigma_k is not positive definite");
}

}  // namespace

SymmetricMatrix solve_spectral(const SpectralDecomposition& eig, const SymmetricMatrix& c_k,
                               double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("solve_spectral: rho must be positive");
  const Index p = c_k.dim();
  if (eig.eigenvalues.size() != p)
    throw std::invalid_argument("solve_spectral: decomposition dimension mismatch");
  if (!(eig.eigenvalues(0) > 0.0))
    throw NotPositiveDefinite(0, "solve_spectral: sigma_k has a non-positive eigenvalue");

  const Matrix& q = eig.eigenvectors;
  const Matrix c_tilde = q.transpose() * c_k.matrix() * q;
  Matrix x_tilde(p, p);
  const auto& k = kernels::active();
  const auto up = static_cast<std::size_t>(p);
  for (Index j = 0; j < p; ++j) {
    k.sylvester_scale_column(c_tilde.col(j).data(), eig.eigenvalues.data(), eig.eigenvalues(j),
                             rho, x_tilde.col(j).data(), up);
  }
  return SymmetricMatrix::symmetrized(q * x_tilde * q.transpose());
}

SymmetricMatrix solve_spectral(const SurrogateSystem& sys) {
  validate(sys);
  return solve_spectral(spectral_decompose(sys.sigma_k), sys.c_k, sys.rho);
}

SymmetricMatrix solve_kronecker(const SurrogateSystem& sys) {
  const Index p = sys.sigma_k.dim();
  if (p > kKroneckerMaxDim) {
    std::ostringstream os;
    os << "solve_kronecker: dimension " << p << " exceeds reference limit " << kKroneckerMaxDim;
    throw std::invalid_argument(os.str());
  }
  validate(sys);
  const Matrix a = inverse_pd(sys.sigma_k).matrix();
  const Index n = p * p;
  // vec is column-major: vec(A X A)_(i + j p) = sum_{k,l} A_ik A_lj X_kl
  Matrix system(n, n);
  for (Index j = 0; j < p; ++j)
    for (Index l = 0; l < p; ++l)
      system.block(j * p, l * p, p, p) = a(l, j) * a;
  system.diagonal().array() += sys.rho;

  const Eigen::Map<const Vector> rhs(sys.c_k.matrix().data(), n);
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) throw NumericalError("solve_kronecker: singular Kronecker system");
  const Vector x = lu.solve(rhs);
  return SymmetricMatrix::symmetrized(Eigen::Map<const Matrix>(x.data(), p, p));
}

SymmetricMatrix solve_fixed_point(const SurrogateSystem& sys, double tol, int max_iter) {
  validate(sys);
  if (!(tol > 0.0)) throw std::invalid_argument("solve_fixed_point: tol must be positive");
  const Matrix a = inverse_pd(sys.sigma_k).matrix();
  const Matrix& c = sys.c_k.matrix();
  const double inv_rho = 1.0 / sys.rho;

  Matrix theta = inv_rho * c;
  const double blowup = 1e6 * std::max(theta.norm(), 1e-300);
  double last_residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    Matrix next = inv_rho * (c - a * theta * a);
    const double step = (next - theta).norm();
    last_residual = sys.rho * step;
    theta.swap(next);
    if (!theta.allFinite() || theta.norm() > blowup) {
      throw NoConvergence("solve_fixed_point: iteration diverged after " + std::to_string(it + 1) +
                              " steps",
                          last_residual);
    }
    if (step <= tol * std::max(1.0, theta.norm())) return SymmetricMatrix::symmetrized(theta);
  }
  throw NoConvergence("solve_fixed_point: no convergence in " + std::to_string(max_iter) +
                          " iterations",
                      last_residual);
}

double residual(const SurrogateSystem& sys, const SymmetricMatrix& x) {
  const Matrix a = inverse_pd(sys.sigma_k).matrix();
  return (sys.rho * x.matrix() + a * x.matrix() * a - sys.c_k.matrix()).norm();
}

}  // namespace sparsecov::sylvester
