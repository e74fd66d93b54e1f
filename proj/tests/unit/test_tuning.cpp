#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <numeric>
#include <set>

#include "helpers.hpp"
#include "sparsecov/parallel.hpp"
#include "sparsecov/synthdata.hpp"
#include "sparsecov/tuning.hpp"

using namespace sparsecov;
using namespace sparsecov::tuning;
using namespace testutil;

TEST_CASE("k-fold split") {
  const auto folds = kfold_split(10, 5, 1);
  REQUIRE(folds.size() == 5);
  for (const auto& f : folds) CHECK(f.size() == 2);

  const auto uneven = kfold_split(23, 5, 9);
  std::set<Index> all;
  std::size_t smallest = 100, largest = 0;
  for (const auto& f : uneven) {
    CHECK(std::is_sorted(f.begin(), f.end()));
    smallest = std::min(smallest, f.size());
    largest = std::max(largest, f.size());
    all.insert(f.begin(), f.end());
  }
  CHECK(all.size() == 23);
  CHECK(*all.begin() == 0);
  CHECK(*all.rbegin() == 22);
  CHECK(largest - smallest <= 1);

  CHECK(kfold_split(23, 5, 9) == uneven);
  CHECK(kfold_split(23, 5, 10) != uneven);
  CHECK_THROWS_AS(kfold_split(3, 5, 0), std::invalid_argument);
  CHECK_THROWS_AS(kfold_split(10, 1, 0), std::invalid_argument);
}

TEST_CASE("default grids") {
  const SymmetricMatrix s = sym({{1, 0.3, -0.8}, {0.3, 1, 0.1}, {-0.8, 0.1, 1}});
  const auto k = default_grid(Method::proxdist, s, 40);
  CHECK(k == std::vector<double>{0, 1, 2, 3});
  const auto big = default_grid(Method::proxdist, SymmetricMatrix::identity(20), 40);
  CHECK(big.size() == 40);
  CHECK(big.front() == 0);
  CHECK(big.back() == 190);
  const auto capped = default_grid(Method::proxdist, SymmetricMatrix::identity(20), 40, 39);
  CHECK(capped.size() == 40);
  CHECK(capped.back() == 39);
  const auto lam = default_grid(Method::soft, s, 5);
  REQUIRE(lam.size() == 5);
  CHECK(lam.front() == 0.0);
  CHECK(lam.back() == doctest::Approx(0.8));
  CHECK(std::is_sorted(lam.begin(), lam.end()));
}

TEST_CASE("cross-validation basics") {
  RngStream rng(81, 0);
  const Matrix x = synthdata::sample_mvn(SymmetricMatrix::identity(4), 60, rng);

  CvSpec one;
  one.grid = {2.0};
  const CvResult r1 = cross_validate(x, Method::proxdist, one);
  CHECK(r1.best_param == 2.0);
  CHECK(r1.table.size() == 1);

  CvSpec spec;
  spec.grid = {0, 1, 2, 3, 4, 5, 6};
  spec.seed = 4;
  const CvResult r = cross_validate(x, Method::proxdist, spec);
  CHECK(r.table.size() == 7);
  for (const auto& row : r.table) {
    CHECK(row.n_folds == 5);
    CHECK(row.std_error >= 0.0);
    CHECK(std::isfinite(row.mean_loss));
  }
  const auto best = std::min_element(r.table.begin(), r.table.end(), [](auto& a, auto& b) {
    return a.mean_loss < b.mean_loss;
  });
  CHECK(r.best_param == best->param);
  CHECK(r.table_csv().rfind("param,mean_loss,stderr,n_folds,boundary_flag\n", 0) == 0);

  setenv("SPARSECOV_THREADS", "1", 1);
  const CvResult seq = cross_validate(x, Method::proxdist, spec);
  unsetenv("SPARSECOV_THREADS");
  CHECK(seq.table_csv() == r.table_csv());

  CvSpec bad;
  CHECK_THROWS_AS(cross_validate(x, Method::proxdist, bad), std::invalid_argument);
  bad.grid = {3, 1};
  CHECK_THROWS_AS(cross_validate(x, Method::proxdist, bad), std::invalid_argument);
  bad.grid = {1};
  bad.folds = 1;
  CHECK_THROWS_AS(cross_validate(x, Method::proxdist, bad), std::invalid_argument);
}

TEST_CASE("ties prefer the sparser parameter and boundaries are flagged") {
  // Identity data: all lambdas above the largest off-diagonal give the same fit.
  RngStream rng(82, 0);
  const Matrix x = synthdata::sample_mvn(SymmetricMatrix::identity(3), 40, rng);
  CvSpec spec;
  spec.grid = {10.0, 20.0, 30.0};
  const CvResult r = cross_validate(x, Method::hard, spec);
  CHECK(r.best_param == 30.0);
  CHECK(r.boundary_warning);
  CHECK(r.table.back().boundary);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("entropy loss falls back when held-out covariance is singular") {
  RngStream rng(83, 0);
  const Matrix x = synthdata::sample_mvn(SymmetricMatrix::identity(6), 20, rng);  // 4 rows per fold
  CvSpec spec;
  spec.grid = {0, 1};
  spec.loss = CvLoss::entropy;
  const CvResult r = cross_validate(x, Method::proxdist, spec);
  CHECK(std::any_of(r.warnings.begin(), r.warnings.end(),
                    [](const std::string& w) { return w.find("frobenius") != std::string::npos; }));
}

TEST_CASE("diagonal truth selects k = 0 in most runs") {
  int zeros = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RngStream rng(seed, 0);
    const Matrix x = synthdata::sample_mvn(SymmetricMatrix::identity(5), 2000, rng);
    CvSpec spec;
    spec.grid = {0, 1, 2, 3, 4, 5};
    spec.seed = seed;
    zeros += cross_validate(x, Method::proxdist, spec).best_param == 0.0;
  }
  CHECK(zeros > 5);
}

TEST_CASE("parallel_for visits each index once and propagates errors") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, [&](std::size_t i) { hits[i]++; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](auto& h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}
