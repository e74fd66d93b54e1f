#pragma once

// Uniform entry point over the three estimators compared throughout:
// proximal distance (parameter k) and soft/hard thresholding (parameter lambda).

#include <optional>
#include <string_view>

#include "sparsecov/matcore.hpp"
#include "sparsecov/proxdist.hpp"

namespace sparsecov {

enum class Method { proxdist, soft, hard };

std::string_view to_string(Method m);
/// Accepts "proxdist", "soft", "hard". Throws std::invalid_argument otherwise.
Method parse_method(std::string_view name);

/// True when smaller parameter values mean sparser estimates (proxdist's k).
constexpr bool smaller_is_sparser(Method m) { return m == Method::proxdist; }

struct Estimate {
  SymmetricMatrix sigma;
  bool is_pd = false;
  /// Present for proxdist only.
  std::optional<proxdist::FitResult> fit;
};

/// param is k (rounded to the nearest integer, clamped to p(p-1)/2) for
/// proxdist and lambda for the thresholds.
Estimate estimate(const SymmetricMatrix& s, Method method, double param,
                  const proxdist::FitConfig& cfg = {},
                  ConstraintMode mode = ConstraintMode::covariance);

}  // namespace sparsecov
