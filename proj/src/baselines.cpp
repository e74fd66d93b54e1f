#include "sparsecov/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "sparsecov/kernels.hpp"
#include "sparsecov/sparsity.hpp"

namespace sparsecov::baselines {

std::string_view to_string(ThresholdKind kind) {
  return kind == ThresholdKind::soft ? "soft" : "hard";
}

SymmetricMatrix threshold(const SymmetricMatrix& s, const ThresholdSpec& spec) {
  if (!(spec.lambda >= 0.0) || !std::isfinite(spec.lambda))
    throw std::invalid_argument("threshold: lambda must be finite and nonnegative");
  const Matrix& a = s.matrix();
  Matrix out(a.rows(), a.cols());
  const auto& k = kernels::active();
  const auto n = static_cast<std::size_t>(a.size());
  if (spec.kind == ThresholdKind::soft)
    k.soft_threshold(a.data(), spec.lambda, out.data(), n);
  else
    k.hard_threshold(a.data(), spec.lambda, out.data(), n);
  out.diagonal() = a.diagonal();
  return SymmetricMatrix::symmetrized(out);
}

std::vector<PathPoint> threshold_path(const SymmetricMatrix& s, ThresholdKind kind,
                                      std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("threshold_path: empty grid");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::invalid_argument("threshold_path: grid must be ascending");
  std::vector<PathPoint> path;
  path.reserve(grid.size());
  for (const double lambda : grid) {
    SymmetricMatrix est = threshold(s, {lambda, kind});
    const bool pd = is_positive_definite(est);
    const std::size_t nnz = sparsity::count_upper_nonzeros(est);
    path.push_back({lambda, std::move(est), pd, nnz});
  }
  return path;
}

}  // namespace sparsecov::baselines
