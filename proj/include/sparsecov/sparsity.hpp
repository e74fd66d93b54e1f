#pragma once

// Sparsity constraint sets and their (non-convex) projections.
//
// covariance mode:  symmetric matrices with at most k nonzero entries in the
//                   strict upper triangle; the diagonal is free.
// correlation mode: the same off-diagonal budget with the diagonal fixed at 1.

#include <cstddef>
#include <string_view>

#include "sparsecov/matcore.hpp"

namespace sparsecov {

enum class ConstraintMode { covariance, correlation };

std::string_view to_string(ConstraintMode mode);

using SupportMask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct SparsityConstraint {
  std::size_t k = 0;
  ConstraintMode mode = ConstraintMode::covariance;

  /// p(p-1)/2, the number of strict upper-triangle positions.
  static std::size_t max_k(Index p);

  /// Throws std::invalid_argument unless k <= max_k(p).
  void check(Index p) const;
};

namespace sparsity {

/// Keeps the k largest-magnitude strict-upper entries (mirrored), zeroes the
/// rest. Among equal magnitudes the smaller (row, col) wins. Correlation mode
/// also sets the diagonal to 1.
SymmetricMatrix project(const SymmetricMatrix& m, const SparsityConstraint& c);

/// ||M - project(M)||_F^2.
double squared_distance(const SymmetricMatrix& m, const SparsityConstraint& c);

/// mask(i,j) = |M_ij| > tol.
SupportMask support_mask(const SymmetricMatrix& m, double tol);

/// 1e-8 * max |M_ij|, the reporting tolerance.
double default_support_tol(const SymmetricMatrix& m);

/// Number of strict-upper entries with |M_ij| > tol.
std::size_t count_upper_nonzeros(const SymmetricMatrix& m, double tol = 0.0);

}  // namespace sparsity
}  // namespace sparsecov
