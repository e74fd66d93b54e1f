#include "sparsecov/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sparsecov/kernels.hpp"
#include "sparsecov/proxdist.hpp"
#include "sparsecov/sparsity.hpp"

namespace sparsecov::evaluation {

namespace {

void require_same_dim(const SymmetricMatrix& a, const SymmetricMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

double entropy_loss(const SymmetricMatrix& truth, const SymmetricMatrix& est) {
  require_same_dim(truth, est, "entropy_loss");
  const CholeskyFactor lt = cholesky(truth);
  const CholeskyFactor le = cholesky(est);
  // tr(T^{-1} E) = tr(L^{-1} E L^{-T})
  const Matrix half = lt.solve_lower(est.matrix());
  const Matrix whitened = lt.solve_lower(half.transpose());
  const double p = static_cast<double>(truth.dim());
  return whitened.trace() - (le.log_det() - lt.log_det()) - p;
}

double rmse(const SymmetricMatrix& truth, const SymmetricMatrix& est) {
  require_same_dim(truth, est, "rmse");
  const double p = static_cast<double>(truth.dim());
  const double ss = kernels::active().squared_diff_sum(
      truth.matrix().data(), est.matrix().data(), static_cast<std::size_t>(truth.matrix().size()));
  return std::sqrt(ss / (p * p));
}

Rates fp_fn_rates(const SymmetricMatrix& truth, const SymmetricMatrix& est, double tol) {
  require_same_dim(truth, est, "fp_fn_rates");
  std::size_t zeros = 0, nonzeros = 0, fp = 0, fn = 0;
  const Index p = truth.dim();
  for (Index j = 1; j < p; ++j) {
    for (Index i = 0; i < j; ++i) {
      const bool true_nz = truth(i, j) != 0.0;
      const bool est_nz = std::fabs(est(i, j)) > tol;
      if (true_nz) {
        ++nonzeros;
        if (!est_nz) ++fn;
      } else {
        ++zeros;
        if (est_nz) ++fp;
      }
    }
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  return {ratio(fp, zeros), ratio(fn, nonzeros)};
}

double gaussian_nll(const SymmetricMatrix& est, const SymmetricMatrix& s, double n) {
  if (!(n >= 1.0)) throw std::invalid_argument("gaussian_nll: n must be >= 1");
  return 0.5 * n * proxdist::negative_loglik_loss(est, s);
}

Criteria info_criteria(const SymmetricMatrix& est, const SymmetricMatrix& s, double n,
                       double gamma, double support_tol) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("info_criteria: gamma must be >= 0");
  const double nll = gaussian_nll(est, s, n);
  const double p = static_cast<double>(est.dim());
  const double q = p + static_cast<double>(sparsity::count_upper_nonzeros(est, support_tol));
  Criteria c;
  c.aic = 2.0 * nll + 2.0 * q;
  c.bic = 2.0 * nll + q * std::log(n);
  c.ebic = c.bic + 2.0 * gamma * q * std::log(p * (p + 1.0) / 2.0);
  return c;
}

MetricReport evaluate(const SymmetricMatrix& truth, const SymmetricMatrix& est,
                      const std::optional<SampleInfo>& sample, double support_tol,
                      double gamma) {
  require_same_dim(truth, est, "evaluate");
  MetricReport r;
  r.estimate_pd = is_positive_definite(est);
  r.entropy_loss =
      r.estimate_pd ? entropy_loss(truth, est) : std::numeric_limits<double>::infinity();
  r.rmse = rmse(truth, est);
  const Rates rates = fp_fn_rates(truth, est, support_tol);
  r.fp_rate = rates.fp;
  r.fn_rate = rates.fn;
  r.nnz = sparsity::count_upper_nonzeros(est, support_tol);
  if (sample && r.estimate_pd) {
    require_same_dim(sample->s, est, "evaluate");
    r.nll = gaussian_nll(est, sample->s, sample->n);
    const Criteria c = info_criteria(est, sample->s, sample->n, gamma, support_tol);
    r.aic = c.aic;
    r.bic = c.bic;
    r.ebic = c.ebic;
  }
  return r;
}

nlohmann::json to_json(const MetricReport& report) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  auto finite_or_null = [](double v) -> nlohmann::json {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  };
  return {{"entropy_loss", finite_or_null(report.entropy_loss)},
          {"rmse", report.rmse},
          {"fp_rate", report.fp_rate},
          {"fn_rate", report.fn_rate},
          {"nll", opt(report.nll)},
          {"aic", opt(report.aic)},
          {"bic", opt(report.bic)},
          {"ebic", opt(report.ebic)},
          {"nnz", report.nnz},
          {"estimate_pd", report.estimate_pd}};
}

std::vector<RocPoint> roc_sweep(const SymmetricMatrix& s, const SymmetricMatrix& truth,
                                Method method, std::span<const double> grid,
                                const proxdist::FitConfig& cfg) {
  require_same_dim(s, truth, "roc_sweep");
  if (grid.empty()) throw std::invalid_argument("roc_sweep: empty grid");
  std::vector<RocPoint> points;
  points.reserve(grid.size());
  for (const double g : grid) {
    const Estimate e = estimate(s, method, g, cfg);
    const Rates r = fp_fn_rates(truth, e.sigma, 0.0);
    points.push_back({g, r.fp, 1.0 - r.fn});
  }
  std::stable_sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
  });
  return points;
}

}  // namespace sparsecov::evaluation
