#include "sparsecov/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparsecov/baselines.hpp"

namespace sparsecov {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::proxdist:
      return "proxdist";
    case Method::soft:
      return "soft";
    case Method::hard:
      return "hard";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "proxdist") return Method::proxdist;
  if (name == "soft") return Method::soft;
  if (name == "hard") return Method::hard;
  throw std::invalid_argument("unknown method '" + std::string(name) +
                              "' (expected proxdist, soft or hard)");
}

Estimate estimate(const SymmetricMatrix& s, Method method, double param,
                  const proxdist::FitConfig& cfg, ConstraintMode mode) {
  if (!std::isfinite(param) || param < 0.0)
    throw std::invalid_argument("estimate: parameter must be finite and nonnegative");
  if (method == Method::proxdist) {
    const auto k = std::min(static_cast<std::size_t>(std::llround(param)),
                            SparsityConstraint::max_k(s.dim()));
    proxdist::FitResult fit = proxdist::fit(s, SparsityConstraint{k, mode}, cfg);
    SymmetricMatrix sigma = proxdist::reported_estimate(fit);
    return {std::move(sigma), true, std::move(fit)};
  }
  const auto kind =
      method == Method::soft ? baselines::ThresholdKind::soft : baselines::ThresholdKind::hard;
  SymmetricMatrix sigma = baselines::threshold(s, {param, kind});
  const bool pd = is_positive_definite(sigma);
  return {std::move(sigma), pd, std::nullopt};
}

}  // namespace sparsecov
