#pragma once

// Solvers for the MM stationarity equation
//
//     rho * X + A^{-1} X A^{-1} = C,      A = current iterate (positive definite)
//
// solve_spectral is the production path. solve_kronecker assembles the dense
// p^2 x p^2 system and is kept as a test oracle only. solve_fixed_point is
// the contraction X <- (C - A^{-1} X A^{-1}) / rho, which converges exactly
// when ||A^{-1}||_2^2 < rho.

#include <stdexcept>

#include "sparsecov/matcore.hpp"

namespace sparsecov::sylvester {

struct SurrogateSystem {
  SymmetricMatrix sigma_k;  // current iterate, positive definite
  SymmetricMatrix c_k;      // right-hand side
  double rho = 1.0;
};

class NoConvergence : public std::runtime_error {
 public:
  NoConvergence(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  /// Frobenius residual of the stationarity equation at the last iterate.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Largest dimension accepted by solve_kronecker.
inline constexpr Index kKroneckerMaxDim = 64;

/// One eigendecomposition of sigma_k, one elementwise divide in its eigenbasis.
SymmetricMatrix solve_spectral(const SurrogateSystem& sys);

/// Same solve when the caller already holds the decomposition of sigma_k.
SymmetricMatrix solve_spectral(const SpectralDecomposition& sigma_k, const SymmetricMatrix& c_k,
                               double rho);

/// Dense vec/Kronecker solve; O(p^6). Throws std::invalid_argument for p > 64.
SymmetricMatrix solve_kronecker(const SurrogateSystem& sys);

/// Fixed-point iteration started from C/rho. Throws NoConvergence after
/// max_iter iterations or when the iterate norm grows by 1e6.
SymmetricMatrix solve_fixed_point(const SurrogateSystem& sys, double tol, int max_iter);

/// ||rho X + A^{-1} X A^{-1} - C||_F.
double residual(const SurrogateSystem& sys, const SymmetricMatrix& x);

}  // namespace sparsecov::sylvester
