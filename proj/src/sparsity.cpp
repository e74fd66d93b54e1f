#include "sparsecov/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "sparsecov/kernels.hpp"

namespace sparsecov {

std::string_view to_string(ConstraintMode mode) {
  return mode == ConstraintMode::covariance ? "covariance" : "correlation";
}

std::size_t SparsityConstraint::max_k(Index p) {
  const auto up = static_cast<std::size_t>(p);
  return up * (up - 1) / 2;
}

void SparsityConstraint::check(Index p) const {
  if (k > max_k(p)) {
    std::ostringstream os;
    os << "sparsity level k = " << k << " exceeds p(p-1)/2 = " << max_k(p) << " for p = " << p;
    throw std::invalid_argument(os.str());
  }
}

namespace sparsity {

namespace {

struct UpperEntry {
  double magnitude;
  Index row;
  Index col;
};

// Strict weak ordering: larger magnitude first, then lexicographic (row, col).
bool ranks_before(const UpperEntry& a, const UpperEntry& b) {
  if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
  if (a.row != b.row) return a.row < b.row;
  return a.col < b.col;
}

}  // namespace

SymmetricMatrix project(const SymmetricMatrix& m, const SparsityConstraint& c) {
  const Index p = m.dim();
  c.check(p);
  const Matrix& a = m.matrix();

  std::vector<UpperEntry> entries;
  entries.reserve(SparsityConstraint::max_k(p));
  for (Index j = 1; j < p; ++j)
    for (Index i = 0; i < j; ++i)
      if (a(i, j) != 0.0) entries.push_back({std::fabs(a(i, j)), i, j});

  const std::size_t keep = std::min(c.k, entries.size());
  if (keep < entries.size()) {
    std::nth_element(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(keep),
                     entries.end(), ranks_before);
  }

  Matrix out = Matrix::Zero(p, p);
  if (c.mode == ConstraintMode::covariance)
    out.diagonal() = a.diagonal();
  else
    out.diagonal().setOnes();
  for (std::size_t e = 0; e < keep; ++e) {
    const auto [mag, i, j] = entries[e];
    out(i, j) = a(i, j);
    out(j, i) = a(i, j);
  }
  return SymmetricMatrix::symmetrized(out);
}

double squared_distance(const SymmetricMatrix& m, const SparsityConstraint& c) {
  const SymmetricMatrix proj = project(m, c);
  return kernels::active().squared_diff_sum(m.matrix().data(), proj.matrix().data(),
                                            static_cast<std::size_t>(m.matrix().size()));
}

SupportMask support_mask(const SymmetricMatrix& m, double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("support_mask: tol must be nonnegative");
  return (m.matrix().array().abs() > tol).matrix();
}

double default_support_tol(const SymmetricMatrix& m) { return 1e-8 * m.max_abs(); }

std::size_t count_upper_nonzeros(const SymmetricMatrix& m, double tol) {
  const Matrix& a = m.matrix();
  std::size_t count = 0;
  for (Index j = 1; j < a.cols(); ++j)
    for (Index i = 0; i < j; ++i)
      if (std::fabs(a(i, j)) > tol) ++count;
  return count;
}

}  // namespace sparsity
}  // namespace sparsecov
