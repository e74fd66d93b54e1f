#include <doctest.h>

#include <vector>

#include "helpers.hpp"
#include "sparsecov/baselines.hpp"
#include "sparsecov/sparsity.hpp"

using namespace sparsecov;
using namespace sparsecov::baselines;
using namespace testutil;

TEST_CASE("threshold examples") {
  const SymmetricMatrix s = sym({{1, 0.3}, {0.3, 1}});
  CHECK(threshold(s, {0.0, ThresholdKind::soft}) == s);
  CHECK(threshold(s, {0.0, ThresholdKind::hard}) == s);
  const SymmetricMatrix soft = threshold(s, {0.1, ThresholdKind::soft});
  CHECK(soft(0, 1) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(soft.diagonal() == s.diagonal());
  CHECK(threshold(s, {0.4, ThresholdKind::hard}) == SymmetricMatrix::identity(2));
  CHECK_THROWS_AS(threshold(s, {-0.1, ThresholdKind::soft}), std::invalid_argument);
}

TEST_CASE("diagonal is never thresholded") {
  const SymmetricMatrix s = sym({{0.05, 0.01}, {0.01, 0.02}});
  for (auto kind : {ThresholdKind::soft, ThresholdKind::hard})
    CHECK(threshold(s, {1.0, kind}) == s.diagonal_part());
}

TEST_CASE("threshold path") {
  RngStream rng(41, 0);
  const SymmetricMatrix s = random_spd(8, rng);

  const std::vector<double> zero{0.0};
  const auto single = threshold_path(s, ThresholdKind::soft, zero);
  REQUIRE(single.size() == 1);
  CHECK(single[0].estimate == s);

  Matrix off = s.matrix();
  off.diagonal().setZero();
  const std::vector<double> above{off.cwiseAbs().maxCoeff() * 1.01};
  for (auto kind : {ThresholdKind::soft, ThresholdKind::hard}) {
    const auto pt = threshold_path(s, kind, above);
    CHECK(pt[0].nnz == 0);
    CHECK(pt[0].estimate == s.diagonal_part());
    CHECK(pt[0].is_pd);
  }

  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(0.05 * i);
  for (auto kind : {ThresholdKind::soft, ThresholdKind::hard}) {
    const auto path = threshold_path(s, kind, grid);
    REQUIRE(path.size() == grid.size());
    for (std::size_t i = 1; i < path.size(); ++i) CHECK(path[i].nnz <= path[i - 1].nnz);
    for (const auto& pt : path) {
      CHECK(pt.nnz == sparsity::count_upper_nonzeros(pt.estimate));
      CHECK(pt.is_pd == is_positive_definite(pt.estimate));
    }
  }

  const std::vector<double> unsorted{0.2, 0.1};
  CHECK_THROWS_AS(threshold_path(s, ThresholdKind::hard, unsorted), std::invalid_argument);
  CHECK_THROWS_AS(threshold_path(s, ThresholdKind::hard, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("soft shrinks at least as much as hard; hard is idempotent") {
  RngStream rng(42, 0);
  for (int t = 0; t < 20; ++t) {
    const SymmetricMatrix s = random_symmetric(6, rng);
    const double lambda = rng.uniform(0.0, 2.0);
    const SymmetricMatrix soft = threshold(s, {lambda, ThresholdKind::soft});
    const SymmetricMatrix hard = threshold(s, {lambda, ThresholdKind::hard});
    Matrix gap = hard.matrix().cwiseAbs() - soft.matrix().cwiseAbs();
    CHECK(gap.minCoeff() >= 0.0);
    CHECK(threshold(hard, {lambda, ThresholdKind::hard}) == hard);
  }
}

TEST_CASE("hard threshold support equals the top-k projection support") {
  RngStream rng(43, 0);
  for (int t = 0; t < 50; ++t) {
    const SymmetricMatrix s = random_symmetric(5, rng);  // continuous draws: distinct magnitudes
    const SymmetricMatrix hard = threshold(s, {rng.uniform(0.0, 2.5), ThresholdKind::hard});
    const std::size_t k = sparsity::count_upper_nonzeros(hard);
    CHECK(sparsity::support_mask(hard, 0.0) ==
          sparsity::support_mask(sparsity::project(s, {k}), 0.0));
  }
}
