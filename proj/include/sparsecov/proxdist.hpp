#pragma once

// Proximal distance estimation of a k-sparse covariance (or correlation)
// matrix under the Gaussian likelihood.
//
// Minimizes  h_rho(Sigma) = ln det Sigma + tr(Sigma^{-1} S) + rho/2 dist(Sigma, C)^2
// by majorization-minimization. Each step replaces the loss by its
// scoring-approximated quadratic expansion at the current iterate and the
// distance by ||Sigma - P_C(Sigma_k)||^2, solves the resulting Sylvester
// equation in closed form, then halves the step until the iterate is
// positive definite and h_rho strictly decreases. rho grows geometrically
// between steps up to rho_max.
//
// With one step per rho the on-support entries stop moving once rho
// outweighs the loss curvature. After the loop the fit therefore offers one
// more candidate: the MLE over the selected support (Fisher scoring), shifted
// off the support by -grad f / rho. It replaces the iterate only when it is
// positive definite and lowers h_rho at the final rho.

#include <functional>
#include <limits>
#include <vector>

#include "sparsecov/matcore.hpp"
#include "sparsecov/sparsity.hpp"

namespace sparsecov::proxdist {

struct FitConfig {
  double rho0 = 0.1;
  double rho_growth = 1.2;
  double rho_max = 1e8;
  /// Relative change of h between outer iterations.
  double tol = 1e-6;
  int max_outer = 500;
  int max_halvings = 32;
  /// Ridge added to S. 0 selects the automatic policy: when
  /// lambda_min(S) < 1e-10 lambda_max(S), add 1e-8 tr(S)/p.
  double ridge_delta = 0.0;
  /// The tolerance exit is only taken once dist^2 <= feasibility_tol *
  /// max(1, ||Sigma||_F^2) or rho has reached rho_max.
  double feasibility_tol = 1e-10;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double rho = 0.0;
  double objective_before = 0.0;  // h_rho at the incoming iterate
  double objective_after = 0.0;   // h_rho at the outgoing iterate
  double penalty = 0.0;           // dist^2 at the outgoing iterate
  int halvings = 0;
  bool accepted = false;  // false: backtracking exhausted, iterate unchanged
};

/// Called after every outer iteration with the new iterate.
using FitObserver = std::function<void(const IterationRecord&, const SymmetricMatrix&)>;

struct FitResult {
  /// Final iterate (after the support polish when accepted): positive
  /// definite, sparse only up to the residual penalty.
  SymmetricMatrix sigma_hat;
  /// P_C(sigma_hat): exact zeros off the selected support.
  SymmetricMatrix sigma_sparse;
  bool sparse_is_pd = false;
  std::vector<double> objective_trace;  // h_rho after each outer iteration
  std::vector<double> rho_trace;        // rho used by each outer iteration
  std::vector<IterationRecord> history;
  int iterations = 0;
  int total_halvings = 0;
  /// Tolerance exit of the MM loop; the polish does not affect it.
  bool converged = false;
  bool polished = false;
  int polish_steps = 0;
  double final_rho = 0.0;
  double final_penalty = 0.0;
  /// Nonzero pattern of sigma_sparse.
  SupportMask support;
  /// Ridge actually added to S (0 when none).
  double ridge_applied = 0.0;
};

/// sigma_sparse when it is positive definite, otherwise sigma_hat.
const SymmetricMatrix& reported_estimate(const FitResult& r);

struct MmStep {
  SymmetricMatrix next;
  int halvings = 0;
  /// No step size in {1, 1/2, ..., 2^-max_halvings} gave a positive definite
  /// iterate with strictly smaller h_rho; next equals the input iterate.
  bool exhausted = false;
  double objective_before = 0.0;
  double objective_after = 0.0;
};

/// ln det Sigma + tr(Sigma^{-1} S). Throws NotPositiveDefinite.
double negative_loglik_loss(const SymmetricMatrix& sigma, const SymmetricMatrix& s);

/// h_rho(Sigma).
double objective(const SymmetricMatrix& sigma, const SymmetricMatrix& s,
                 const SparsityConstraint& c, double rho);

/// q_rho(Sigma | Sigma_k), the quadratic surrogate minimized by each step.
double surrogate_value(const SymmetricMatrix& sigma, const SymmetricMatrix& sigma_k,
                       const SymmetricMatrix& s, const SparsityConstraint& c, double rho);

/// Gradient of q_rho(. | Sigma_k) at Sigma:
///   Sk^{-1} - Sk^{-1} S Sk^{-1} + Sk^{-1} (Sigma - Sk) Sk^{-1} + rho (Sigma - P_C(Sk)).
SymmetricMatrix surrogate_gradient(const SymmetricMatrix& sigma, const SymmetricMatrix& sigma_k,
                                   const SymmetricMatrix& s, const SparsityConstraint& c,
                                   double rho);

/// Right-hand side C_k = rho P_C(Sk) + Sk^{-1} S Sk^{-1}.
SymmetricMatrix surrogate_rhs(const SymmetricMatrix& sigma_k, const SymmetricMatrix& s,
                              const SparsityConstraint& c, double rho);

/// One MM update with step halving.
MmStep mm_step(const SymmetricMatrix& sigma_k, const SymmetricMatrix& s,
               const SparsityConstraint& c, double rho, int max_halvings = 32);

/// Full fit from Sigma_0 = Diag(S).
FitResult fit(const SymmetricMatrix& s, const SparsityConstraint& c, const FitConfig& cfg = {},
              const FitObserver& observer = {});

/// Fit on a correlation matrix (unit diagonal within 1e-8) with the
/// correlation-mode constraint.
FitResult fit_correlation(const SymmetricMatrix& r, std::size_t k, const FitConfig& cfg = {},
                          const FitObserver& observer = {});

/// R = D^{-1/2} S D^{-1/2} with D = diag(S).
SymmetricMatrix correlation_from_covariance(const SymmetricMatrix& s);

/// Ridge that the automatic policy would add to s (0 when none is needed).
double auto_ridge(const SymmetricMatrix& s);

/// ||Sigma^{-1} - Sigma^{-1} S Sigma^{-1} + rho (Sigma - P_C(Sigma))||_F.
double stationarity_residual(const SymmetricMatrix& sigma, const SymmetricMatrix& s,
                             const SparsityConstraint& c, double rho);

}  // namespace sparsecov::proxdist
