#pragma once

// Accuracy metrics against a known truth, Gaussian likelihood, and
// information criteria.

#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "sparsecov/estimators.hpp"
#include "sparsecov/matcore.hpp"

namespace sparsecov::evaluation {

struct Rates {
  double fp = 0.0;
  double fn = 0.0;
};

struct Criteria {
  double aic = 0.0;
  double bic = 0.0;
  double ebic = 0.0;
};

inline constexpr double kDefaultEbicGamma = 0.5;

struct MetricReport {
  double entropy_loss = 0.0;  // +inf when the estimate is not positive definite
  double rmse = 0.0;
  double fp_rate = 0.0;
  double fn_rate = 0.0;
  std::optional<double> nll;
  std::optional<double> aic;
  std::optional<double> bic;
  std::optional<double> ebic;
  std::size_t nnz = 0;
  bool estimate_pd = true;
};

/// tr(T^{-1} E) - ln det(T^{-1} E) - p. Throws NotPositiveDefinite.
double entropy_loss(const SymmetricMatrix& truth, const SymmetricMatrix& est);

/// sqrt(||T - E||_F^2 / p^2).
double rmse(const SymmetricMatrix& truth, const SymmetricMatrix& est);

/// Over strict-upper positions: fp = #(truth 0, |est| > tol) / #(truth 0),
/// fn = #(truth != 0, |est| <= tol) / #(truth != 0); 0/0 is 0.
Rates fp_fn_rates(const SymmetricMatrix& truth, const SymmetricMatrix& est, double tol = 0.0);

/// (n/2) [ln det E + tr(E^{-1} S)], the (n p / 2) ln(2 pi) constant dropped.
double gaussian_nll(const SymmetricMatrix& est, const SymmetricMatrix& s, double n);

/// q = p + nnz_upper(E) parameters; AIC = 2 nll + 2q, BIC = 2 nll + q ln n,
/// EBIC = BIC + 2 gamma q ln(p(p+1)/2).
Criteria info_criteria(const SymmetricMatrix& est, const SymmetricMatrix& s, double n,
                       double gamma = kDefaultEbicGamma, double support_tol = 0.0);

struct SampleInfo {
  SymmetricMatrix s;
  double n = 0.0;
};

/// All metrics in one report. Likelihood fields are filled only when sample
/// information is given and the estimate is positive definite.
MetricReport evaluate(const SymmetricMatrix& truth, const SymmetricMatrix& est,
                      const std::optional<SampleInfo>& sample = std::nullopt,
                      double support_tol = 0.0, double gamma = kDefaultEbicGamma);

nlohmann::json to_json(const MetricReport& report);

struct RocPoint {
  double param = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

/// Fits/thresholds at every grid value and reports (fp rate, 1 - fn rate),
/// sorted by fpr (ties by tpr).
std::vector<RocPoint> roc_sweep(const SymmetricMatrix& s, const SymmetricMatrix& truth,
                                Method method, std::span<const double> grid,
                                const proxdist::FitConfig& cfg = {});

}  // namespace sparsecov::evaluation
