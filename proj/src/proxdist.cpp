#include "sparsecov/proxdist.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "sparsecov/kernels.hpp"
#include "sparsecov/sylvester.hpp"

namespace sparsecov::proxdist {

namespace {

struct Evaluated {
  SymmetricMatrix sigma;
  double loss = 0.0;
  double penalty = 0.0;

  double objective(double rho) const { return loss + 0.5 * rho * penalty; }
};

double loss_from_factor(const CholeskyFactor& chol, const SymmetricMatrix& s) {
  const Index p = chol.dim();
  const Matrix linv = chol.solve_lower(Matrix::Identity(p, p));
  // tr(Sigma^{-1} S) = tr(Linv^T Linv S) = sum(Linv .* (Linv S))
  const double trace_term = linv.cwiseProduct(linv * s.matrix()).sum();
  return chol.log_det() + trace_term;
}

std::optional<Evaluated> evaluate(SymmetricMatrix sigma, const SymmetricMatrix& s,
                                  const SparsityConstraint& c) {
  Index failed = -1;
  if ((failed = failing_pivot(sigma)) >= 0) return std::nullopt;
  const double loss = loss_from_factor(cholesky(sigma), s);
  if (!std::isfinite(loss)) return std::nullopt;
  const double penalty = sparsity::squared_distance(sigma, c);
  return Evaluated{std::move(sigma), loss, penalty};
}

SymmetricMatrix inverse_from(const SpectralDecomposition& eig) {
  const Matrix& q = eig.eigenvectors;
  return SymmetricMatrix::symmetrized(q * eig.eigenvalues.cwiseInverse().asDiagonal() *
                                      q.transpose());
}

struct StepOutcome {
  Evaluated next;
  int halvings = 0;
  bool exhausted = false;
};

StepOutcome step_from(const Evaluated& cur, const SymmetricMatrix& s, const SparsityConstraint& c,
                      double rho, int max_halvings) {
  const SpectralDecomposition eig = spectral_decompose(cur.sigma);
  const Matrix inv = inverse_from(eig).matrix();
  const SymmetricMatrix rhs =
      rho * sparsity::project(cur.sigma, c) +
      SymmetricMatrix::symmetrized(inv * s.matrix() * inv);
  const SymmetricMatrix target = sylvester::solve_spectral(eig, rhs, rho);

  const double h0 = cur.objective(rho);
  if (target == cur.sigma) return {cur, 0, true};

  const auto& k = kernels::active();
  const Index p = cur.sigma.dim();
  const auto n = static_cast<std::size_t>(p * p);
  Matrix candidate(p, p);
  double t = 1.0;
  for (int halvings = 0; halvings <= max_halvings; ++halvings, t *= 0.5) {
    k.lerp(cur.sigma.matrix().data(), target.matrix().data(), t, candidate.data(), n);
    SymmetricMatrix cand = SymmetricMatrix::symmetrized(candidate);
    if (cand == cur.sigma) break;
    auto ev = evaluate(std::move(cand), s, c);
    if (ev && ev->objective(rho) < h0) return {std::move(*ev), halvings, false};
  }
  return {cur, max_halvings, true};
}

// Entries left free by the constraint once the support is fixed: the
// selected off-diagonal pairs, plus the diagonal in covariance mode.
struct FreeEntries {
  std::vector<Index> row, col;  // row <= col
  Index size() const { return static_cast<Index>(row.size()); }
};

FreeEntries free_entries(const SymmetricMatrix& theta, ConstraintMode mode) {
  FreeEntries f;
  const Index p = theta.dim();
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i <= j; ++i) {
      const bool keep = i == j ? mode == ConstraintMode::covariance : theta(i, j) != 0.0;
      if (keep) f.row.push_back(i), f.col.push_back(j);
    }
  return f;
}

// Coordinates of a symmetric matrix in the free entries, with the factor 2
// that an off-diagonal parameter picks up from appearing twice.
Vector gather(const Matrix& m, const FreeEntries& f) {
  Vector v(f.size());
  for (Index a = 0; a < f.size(); ++a) {
    const Index i = f.row[static_cast<std::size_t>(a)], j = f.col[static_cast<std::size_t>(a)];
    v(a) = i == j ? m(i, j) : 2.0 * m(i, j);
  }
  return v;
}

Matrix scatter(const Vector& v, const FreeEntries& f, Index p) {
  Matrix m = Matrix::Zero(p, p);
  for (Index a = 0; a < f.size(); ++a) {
    const Index i = f.row[static_cast<std::size_t>(a)], j = f.col[static_cast<std::size_t>(a)];
    m(i, j) = m(j, i) = v(a);
  }
  return m;
}

// Fisher scoring for the loss restricted to the free entries. The scoring
// system tr(W E_a W E_b) d = -g is solved by Jacobi-preconditioned CG, so
// only products W V W are needed. Steps are halved until the iterate is
// positive definite and the loss strictly decreases.
Evaluated scoring_on_support(Evaluated cur, const FreeEntries& f, const SymmetricMatrix& s,
                             const SparsityConstraint& c, int max_halvings, int& steps) {
  const Index p = cur.sigma.dim();
  const Index m = f.size();
  steps = 0;
  if (m == 0) return cur;
  for (int it = 0; it < 100; ++it) {
    const Matrix w = inverse_pd(cur.sigma).matrix();
    const Vector g = gather(w - w * s.matrix() * w, f);

    Vector precond(m);
    for (Index a = 0; a < m; ++a) {
      const Index i = f.row[static_cast<std::size_t>(a)], j = f.col[static_cast<std::size_t>(a)];
      precond(a) = i == j ? w(i, i) * w(i, i) : 2.0 * (w(i, i) * w(j, j) + w(i, j) * w(i, j));
    }
    Vector x = Vector::Zero(m);
    Vector r = -g;
    Vector z = r.cwiseQuotient(precond);
    Vector dir = z;
    double rz = r.dot(z);
    const double stop = 1e-10 * g.norm();
    for (Index cg = 0; cg < std::max<Index>(m, 50) && r.norm() > stop; ++cg) {
      const Matrix v = scatter(dir, f, p);
      const Vector hd = gather(w * v * w, f);
      const double curvature = dir.dot(hd);
      if (!(curvature > 0.0)) break;
      const double alpha = rz / curvature;
      x += alpha * dir;
      r -= alpha * hd;
      z = r.cwiseQuotient(precond);
      const double rz_next = r.dot(z);
      dir = z + (rz_next / rz) * dir;
      rz = rz_next;
    }
    if (!(-g.dot(x) > 1e-15 * std::max(1.0, std::fabs(cur.loss)))) break;

    const Matrix step = scatter(x, f, p);
    bool moved = false;
    double t = 1.0;
    for (int h = 0; h <= max_halvings && !moved; ++h, t *= 0.5) {
      auto ev = evaluate(SymmetricMatrix::symmetrized(cur.sigma.matrix() + t * step), s, c);
      if (ev && ev->loss < cur.loss) cur = std::move(*ev), moved = true;
    }
    if (!moved) break;
    ++steps;
  }
  return cur;
}

// Once rho dominates the loss curvature a single MM step per rho barely moves
// the on-support entries. The penalized minimizers approach the constrained
// MLE on the selected support, shifted off the support by -grad f / rho, so
// that point is offered as a final candidate under the same acceptance rule
// as an MM step.
std::optional<Evaluated> polish(const Evaluated& cur, const SymmetricMatrix& s,
                                const SparsityConstraint& c, double rho, int max_halvings,
                                int& steps) {
  const SymmetricMatrix theta = sparsity::project(cur.sigma, c);
  const FreeEntries f = free_entries(theta, c.mode);

  // Shrink the selected off-diagonals toward the (positive) diagonal until
  // the start is positive definite.
  const Matrix diag = theta.diagonal_part().matrix();
  const Matrix off = theta.matrix() - diag;
  std::optional<Evaluated> start;
  double t = 1.0;
  for (int h = 0; h <= max_halvings && !start; ++h, t *= 0.5)
    start = evaluate(SymmetricMatrix::symmetrized(diag + t * off), s, c);
  if (!start) start = evaluate(SymmetricMatrix::symmetrized(diag), s, c);
  if (!start) return std::nullopt;

  const Evaluated mle = scoring_on_support(std::move(*start), f, s, c, max_halvings, steps);
  const Matrix w = inverse_pd(mle.sigma).matrix();
  Matrix shift = w - w * s.matrix() * w;
  for (Index a = 0; a < f.size(); ++a) {
    const Index i = f.row[static_cast<std::size_t>(a)], j = f.col[static_cast<std::size_t>(a)];
    shift(i, j) = shift(j, i) = 0.0;
  }
  auto cand = evaluate(SymmetricMatrix::symmetrized(mle.sigma.matrix() - shift / rho), s, c);
  if (cand && cand->objective(rho) < cur.objective(rho)) return cand;
  return std::nullopt;
}

void require_compatible(const SymmetricMatrix& a, const SymmetricMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

void FitConfig::validate() const {
  auto fail = [](const char* msg) { throw std::invalid_argument(std::string("FitConfig: ") + msg); };
  if (!(rho0 > 0.0) || !std::isfinite(rho0)) fail("rho0 must be positive and finite");
  if (!(rho_growth > 1.0) || !std::isfinite(rho_growth)) fail("rho_growth must exceed 1");
  if (!(rho_max >= rho0)) fail("rho_max must be at least rho0");
  if (!(tol > 0.0)) fail("tol must be positive");
  if (max_outer < 1) fail("max_outer must be >= 1");
  if (max_halvings < 0) fail("max_halvings must be >= 0");
  if (!(ridge_delta >= 0.0) || !std::isfinite(ridge_delta)) fail("ridge_delta must be >= 0");
  if (!(feasibility_tol >= 0.0)) fail("feasibility_tol must be >= 0");
}

double negative_loglik_loss(const SymmetricMatrix& sigma, const SymmetricMatrix& s) {
  require_compatible(sigma, s, "negative_loglik_loss");
  return loss_from_factor(cholesky(sigma), s);
}

double objective(const SymmetricMatrix& sigma, const SymmetricMatrix& s,
                 const SparsityConstraint& c, double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("objective: rho must be nonnegative");
  return negative_loglik_loss(sigma, s) + 0.5 * rho * sparsity::squared_distance(sigma, c);
}

double surrogate_value(const SymmetricMatrix& sigma, const SymmetricMatrix& sigma_k,
                       const SymmetricMatrix& s, const SparsityConstraint& c, double rho) {
  require_compatible(sigma, sigma_k, "surrogate_value");
  const Matrix inv = inverse_pd(sigma_k).matrix();
  const Matrix d = sigma.matrix() - sigma_k.matrix();
  const Matrix inv_d = inv * d;
  const double linear = inv_d.trace() - (inv * s.matrix() * inv_d).trace();
  const double quadratic = 0.5 * (inv_d * inv_d).trace();
  const Matrix gap = sigma.matrix() - sparsity::project(sigma_k, c).matrix();
  return negative_loglik_loss(sigma_k, s) + linear + quadratic + 0.5 * rho * gap.squaredNorm();
}

SymmetricMatrix surrogate_gradient(const SymmetricMatrix& sigma, const SymmetricMatrix& sigma_k,
                                   const SymmetricMatrix& s, const SparsityConstraint& c,
                                   double rho) {
  require_compatible(sigma, sigma_k, "surrogate_gradient");
  require_compatible(sigma, s, "surrogate_gradient");
  const Matrix inv = inverse_pd(sigma_k).matrix();
  const Matrix d = sigma.matrix() - sigma_k.matrix();
  const Matrix grad = inv - inv * s.matrix() * inv + inv * d * inv +
                      rho * (sigma.matrix() - sparsity::project(sigma_k, c).matrix());
  return SymmetricMatrix::symmetrized(grad);
}

SymmetricMatrix surrogate_rhs(const SymmetricMatrix& sigma_k, const SymmetricMatrix& s,
                              const SparsityConstraint& c, double rho) {
  const Matrix inv = inverse_pd(sigma_k).matrix();
  return rho * sparsity::project(sigma_k, c) +
         SymmetricMatrix::symmetrized(inv * s.matrix() * inv);
}

MmStep mm_step(const SymmetricMatrix& sigma_k, const SymmetricMatrix& s,
               const SparsityConstraint& c, double rho, int max_halvings) {
  require_compatible(sigma_k, s, "mm_step");
  c.check(s.dim());
  if (!(rho > 0.0)) throw std::invalid_argument("mm_step: rho must be positive");
  if (max_halvings < 0) throw std::invalid_argument("mm_step: max_halvings must be >= 0");
  auto cur = evaluate(sigma_k, s, c);
  if (!cur) throw NotPositiveDefinite(failing_pivot(sigma_k), "mm_step: sigma_k is not positive definite");
  const double before = cur->objective(rho);
  StepOutcome out = step_from(*cur, s, c, rho, max_halvings);
  return {std::move(out.next.sigma), out.halvings, out.exhausted, before,
          out.next.objective(rho)};
}

double auto_ridge(const SymmetricMatrix& s) {
  const Vector ev = spectral_decompose(s).eigenvalues;
  const double lmin = ev(0);
  const double lmax = ev(ev.size() - 1);
  if (lmin < 1e-10 * lmax) return 1e-8 * s.trace() / static_cast<double>(s.dim());
  return 0.0;
}

FitResult fit(const SymmetricMatrix& s_in, const SparsityConstraint& c, const FitConfig& cfg,
              const FitObserver& observer) {
  cfg.validate();
  const Index p = s_in.dim();
  c.check(p);

  FitResult result;
  result.ridge_applied = cfg.ridge_delta > 0.0 ? cfg.ridge_delta : auto_ridge(s_in);
  const SymmetricMatrix s =
      result.ridge_applied > 0.0
          ? s_in + result.ridge_applied * SymmetricMatrix::identity(p)
          : s_in;

  for (Index i = 0; i < p; ++i) {
    if (!(s(i, i) > 0.0)) {
      std::ostringstream os;
      os << "fit: sample variance " << i << " is not positive; Diag(S) is singular. "
         << "Pass a positive ridge (ridge_delta) to regularize S.";
      throw std::invalid_argument(os.str());
    }
  }

  if (!is_positive_definite(s)) {
    std::ostringstream os;
    os << "fit: S + " << result.ridge_applied
       << " I is not positive definite; S must be positive semidefinite";
    throw NotPositiveDefinite(failing_pivot(s), os.str());
  }

  auto start = evaluate(s.diagonal_part(), s, c);
  if (!start) throw NotPositiveDefinite(0, "fit: initial iterate is not positive definite");
  Evaluated cur = std::move(*start);

  double rho = cfg.rho0;
  double h_prev = cur.objective(rho);
  for (int it = 1; it <= cfg.max_outer; ++it) {
    const double h_before = cur.objective(rho);
    StepOutcome step = step_from(cur, s, c, rho, cfg.max_halvings);
    cur = std::move(step.next);
    const double h_new = cur.objective(rho);

    IterationRecord rec{it, rho, h_before, h_new, cur.penalty, step.halvings, !step.exhausted};
    result.history.push_back(rec);
    result.objective_trace.push_back(h_new);
    result.rho_trace.push_back(rho);
    result.total_halvings += step.halvings;
    result.iterations = it;
    if (observer) observer(rec, cur.sigma);

    const double rel = std::fabs(h_new - h_prev) / std::max(std::fabs(h_prev), 1e-12);
    const double scale = std::max(1.0, cur.sigma.matrix().squaredNorm());
    const bool feasible = cur.penalty <= cfg.feasibility_tol * scale || rho >= cfg.rho_max;
    if (rel <= cfg.tol && feasible) {
      result.converged = true;
      break;
    }
    h_prev = h_new;
    rho = std::min(rho * cfg.rho_growth, cfg.rho_max);
  }

  result.final_rho = result.rho_trace.empty() ? rho : result.rho_trace.back();
  if (auto better = polish(cur, s, c, result.final_rho, cfg.max_halvings, result.polish_steps)) {
    cur = std::move(*better);
    result.polished = true;
  }
  result.final_penalty = cur.penalty;
  result.sigma_sparse = sparsity::project(cur.sigma, c);
  result.sparse_is_pd = is_positive_definite(result.sigma_sparse);
  result.support = sparsity::support_mask(result.sigma_sparse, 0.0);
  result.sigma_hat = std::move(cur.sigma);
  return result;
}

const SymmetricMatrix& reported_estimate(const FitResult& r) {
  return r.sparse_is_pd ? r.sigma_sparse : r.sigma_hat;
}

SymmetricMatrix correlation_from_covariance(const SymmetricMatrix& s) {
  const Vector d = s.diagonal();
  if ((d.array() <= 0.0).any())
    throw std::invalid_argument("correlation_from_covariance: non-positive variance");
  const Vector inv_sd = d.cwiseSqrt().cwiseInverse();
  Matrix r = inv_sd.asDiagonal() * s.matrix() * inv_sd.asDiagonal();
  r.diagonal().setOnes();
  return SymmetricMatrix::symmetrized(r);
}

FitResult fit_correlation(const SymmetricMatrix& r, std::size_t k, const FitConfig& cfg,
                          const FitObserver& observer) {
  const double worst = (r.diagonal().array() - 1.0).abs().maxCoeff();
  if (worst > 1e-8) {
    std::ostringstream os;
    os << "fit_correlation: diagonal deviates from 1 by " << worst;
    throw std::invalid_argument(os.str());
  }
  return fit(r, SparsityConstraint{k, ConstraintMode::correlation}, cfg, observer);
}

double stationarity_residual(const SymmetricMatrix& sigma, const SymmetricMatrix& s,
                             const SparsityConstraint& c, double rho) {
  const Matrix inv = inverse_pd(sigma).matrix();
  const Matrix g = inv - inv * s.matrix() * inv +
                   rho * (sigma.matrix() - sparsity::project(sigma, c).matrix());
  return g.norm();
}

}  // namespace sparsecov::proxdist
