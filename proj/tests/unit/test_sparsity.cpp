#include <doctest.h>

#include <limits>
#include <vector>

#include "helpers.hpp"
#include "sparsecov/sparsity.hpp"

using namespace sparsecov;
using namespace testutil;

namespace {

// Minimum of ||M - A||_F^2 over A in the constraint set, by enumerating
// every support of size <= k. The best A on a fixed support copies M there.
double brute_force_distance(const SymmetricMatrix& m, const SparsityConstraint& c) {
  const Index p = m.dim();
  std::vector<std::pair<Index, Index>> slots;
  for (Index j = 1; j < p; ++j)
    for (Index i = 0; i < j; ++i) slots.emplace_back(i, j);
  double diag_cost = 0.0;
  if (c.mode == ConstraintMode::correlation)
    for (Index i = 0; i < p; ++i) diag_cost += (m(i, i) - 1.0) * (m(i, i) - 1.0);
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = slots.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) > c.k) continue;
    double cost = diag_cost;
    for (std::size_t s = 0; s < n; ++s)
      if (!(mask >> s & 1)) cost += 2.0 * m(slots[s].first, slots[s].second) * m(slots[s].first, slots[s].second);
    best = std::min(best, cost);
  }
  return best;
}

}  // namespace

TEST_CASE("projection examples") {
  const SymmetricMatrix m = sym({{5, 1, -3}, {1, 6, 2}, {-3, 2, 7}});
  CHECK(sparsity::project(m, {1}) == sym({{5, 0, -3}, {0, 6, 0}, {-3, 0, 7}}));

  const SymmetricMatrix already = sym({{5, 0, -3}, {0, 6, 0}, {-3, 0, 7}});
  CHECK(sparsity::project(already, {1}) == already);
  CHECK(sparsity::project(already, {3}) == already);

  CHECK(sparsity::project(sym({{2, 0.9}, {0.9, 2}}), {0, ConstraintMode::correlation}) ==
        SymmetricMatrix::identity(2));
}

TEST_CASE("projection breaks ties toward the smaller index") {
  const SymmetricMatrix m = sym({{1, 2, -2}, {2, 1, 2}, {-2, 2, 1}});
  const SymmetricMatrix one = sparsity::project(m, {1});
  CHECK(one(0, 1) == 2.0);
  CHECK(one(0, 2) == 0.0);
  CHECK(one(1, 2) == 0.0);
  const SymmetricMatrix two = sparsity::project(m, {2});
  CHECK(two(0, 1) == 2.0);
  CHECK(two(0, 2) == -2.0);
  CHECK(two(1, 2) == 0.0);
}

TEST_CASE("zeros never use up the budget") {
  const SymmetricMatrix m = sym({{1, 0, 0.5}, {0, 1, 0}, {0.5, 0, 1}});
  const SymmetricMatrix proj = sparsity::project(m, {3});
  CHECK(proj == m);
  CHECK(sparsity::count_upper_nonzeros(proj) == 1);
}

TEST_CASE("squared distance") {
  CHECK(sparsity::squared_distance(sym({{1, 3, 2}, {3, 1, 0}, {2, 0, 1}}), {1}) == 8.0);
  CHECK(sparsity::squared_distance(SymmetricMatrix::identity(4), {0}) == 0.0);
  CHECK(sparsity::squared_distance(SymmetricMatrix::identity(4), {0, ConstraintMode::correlation}) == 0.0);

  RngStream rng(31, 0);
  const SymmetricMatrix m = random_symmetric(6, rng);
  const double d = sparsity::squared_distance(m, {4});
  CHECK(d > 0.0);
  CHECK(d == doctest::Approx((m.matrix() - sparsity::project(m, {4}).matrix()).squaredNorm()).epsilon(1e-14));
  for (double t : {0.5, 3.0, 17.0})
    CHECK(sparsity::squared_distance(t * m, {4}) == doctest::Approx(t * t * d).epsilon(1e-12));
  CHECK(sparsity::squared_distance(sparsity::project(m, {4}), {4}) == 0.0);
}

TEST_CASE("projection attains the brute-force minimum") {
  RngStream rng(32, 0);
  for (Index p = 2; p <= 4; ++p) {
    for (std::size_t k = 0; k <= SparsityConstraint::max_k(p); ++k) {
      for (auto mode : {ConstraintMode::covariance, ConstraintMode::correlation}) {
        for (int t = 0; t < 20; ++t) {
          const SymmetricMatrix m = random_symmetric(p, rng);
          const SparsityConstraint c{k, mode};
          CHECK(std::fabs(sparsity::squared_distance(m, c) - brute_force_distance(m, c)) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("projection is idempotent and lands in the set") {
  RngStream rng(33, 0);
  for (int t = 0; t < 50; ++t) {
    const Index p = 2 + static_cast<Index>(rng.below(8));
    const std::size_t k = rng.below(SparsityConstraint::max_k(p) + 1);
    const auto mode = t % 2 ? ConstraintMode::covariance : ConstraintMode::correlation;
    const SymmetricMatrix m = random_symmetric(p, rng);
    const SymmetricMatrix once = sparsity::project(m, {k, mode});
    CHECK(sparsity::project(once, {k, mode}) == once);
    CHECK(sparsity::count_upper_nonzeros(once) <= k);
    if (mode == ConstraintMode::correlation) CHECK((once.diagonal().array() == 1.0).all());
    else CHECK(once.diagonal() == m.diagonal());
  }
}

TEST_CASE("half squared distance has gradient M - P(M)") {
  RngStream rng(34, 0);
  const double h = 1e-6;
  for (int t = 0; t < 10; ++t) {
    const SymmetricMatrix m = random_symmetric(5, rng);
    const SparsityConstraint c{3, t % 2 ? ConstraintMode::covariance : ConstraintMode::correlation};
    const Matrix grad = m.matrix() - sparsity::project(m, c).matrix();
    for (Index j = 0; j < 5; ++j) {
      for (Index i = 0; i <= j; ++i) {
        Matrix e = Matrix::Zero(5, 5);
        e(i, j) = e(j, i) = 1.0;
        const double fd = (0.5 * sparsity::squared_distance(SymmetricMatrix(m.matrix() + h * e), c) -
                           0.5 * sparsity::squared_distance(SymmetricMatrix(m.matrix() - h * e), c)) /
                          (2 * h);
        const double analytic = (grad.array() * e.array()).sum();
        CHECK(std::fabs(fd - analytic) < 1e-5);
      }
    }
  }
}

TEST_CASE("support mask") {
  const SupportMask zero = sparsity::support_mask(SymmetricMatrix::zero(3), 0.0);
  CHECK_FALSE(zero.any());
  const SupportMask id = sparsity::support_mask(SymmetricMatrix::identity(3), 0.0);
  CHECK(id == Eigen::Matrix<bool, 3, 3>::Identity());

  RngStream rng(35, 0);
  const SymmetricMatrix proj = sparsity::project(random_symmetric(6, rng), {3});
  const SupportMask mask = sparsity::support_mask(proj, 0.0);
  int upper = 0;
  for (Index j = 1; j < 6; ++j)
    for (Index i = 0; i < j; ++i) upper += mask(i, j);
  CHECK(upper == 3);
  CHECK(mask == mask.transpose());

  const SymmetricMatrix m = sym({{2, 1e-9}, {1e-9, 1}});
  CHECK(sparsity::default_support_tol(m) == doctest::Approx(2e-8));
  CHECK(sparsity::count_upper_nonzeros(m, sparsity::default_support_tol(m)) == 0);
  CHECK(sparsity::count_upper_nonzeros(m) == 1);
}

TEST_CASE("constraint bounds") {
  CHECK(SparsityConstraint::max_k(1) == 0);
  CHECK(SparsityConstraint::max_k(20) == 190);
  CHECK_NOTHROW(SparsityConstraint{3}.check(3));
  CHECK_THROWS_AS(SparsityConstraint{4}.check(3), std::invalid_argument);
  CHECK_THROWS_AS(sparsity::project(SymmetricMatrix::identity(3), {4}), std::invalid_argument);
}
