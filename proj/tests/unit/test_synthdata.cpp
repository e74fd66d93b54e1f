#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include "helpers.hpp"
#include "sparsecov/parallel.hpp"
#include "sparsecov/synthdata.hpp"

using namespace sparsecov;
using namespace sparsecov::synthdata;
using namespace testutil;

TEST_CASE("splitmix64 reference values") {
  // First outputs of the reference splitmix64 generator seeded with 0.
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(splitmix64(0x9E3779B97F4A7C15ULL) == 0x6E789E6AA1B965F4ULL);
}

TEST_CASE("random streams") {
  RngStream a(5, 2), b(5, 2), c(5, 3);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    differs |= x != c.normal();
  }
  CHECK(differs);

  RngStream u(9, 0);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = u.uniform();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    CHECK(u.below(7) < 7);
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK_THROWS_AS(u.below(0), std::invalid_argument);
}

TEST_CASE("deterministic designs") {
  SimDesign d;
  d.kind = DesignKind::independent;
  d.p = 4;
  CHECK(make_design(d) == SymmetricMatrix::identity(4));

  d.kind = DesignKind::moving_average;
  d.p = 3;
  const SymmetricMatrix ma = make_design(d);
  CHECK(ma == sym({{1, 0.4, 0}, {0.4, 1, 0.4}, {0, 0.4, 1}}));
  CHECK(spectral_decompose(ma).eigenvalues(0) == doctest::Approx(1.0 - 0.4 * std::sqrt(2.0)));

  d.kind = DesignKind::cliques;
  d.p = 7;
  d.block_size = 3;
  const SymmetricMatrix cl = make_design(d);
  CHECK(cl(0, 2) == 0.4);
  CHECK(cl(2, 3) == 0.0);
  CHECK(cl(3, 5) == 0.4);
  CHECK(cl(6, 6) == 1.0);
  CHECK(cl(5, 6) == 0.0);

  // A band too strong for unit variances is shifted back into the cone.
  d.kind = DesignKind::moving_average;
  d.p = 10;
  d.band_value = 0.9;
  const SymmetricMatrix shifted = make_design(d);
  CHECK(is_positive_definite(shifted));
  CHECK(spectral_decompose(shifted).eigenvalues(0) == doctest::Approx(d.pd_shift_margin));
}

TEST_CASE("random sparse designs") {
  CHECK(random_sparse_count(20, 0.02) == 4);
  CHECK(random_sparse_count(10, 0.2) == 9);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SimDesign d;
    d.p = 20;
    d.seed = seed;
    const SymmetricMatrix m = make_design(d);
    CHECK(sparsity::count_upper_nonzeros(m) == 4);
    CHECK(is_positive_definite(m));
    CHECK((m.diagonal().array() == 1.0).all());
    for (Index j = 1; j < 20; ++j)
      for (Index i = 0; i < j; ++i)
        if (m(i, j) != 0.0) {
          CHECK(std::fabs(m(i, j)) >= 0.3);
          CHECK(std::fabs(m(i, j)) <= 0.6);
        }
  }
  SimDesign bad;
  bad.sparsity_frac = 0.0;
  CHECK_THROWS_AS(make_design(bad), std::invalid_argument);
  bad = SimDesign{};
  bad.p = 1;
  CHECK_THROWS_AS(make_design(bad), std::invalid_argument);
  CHECK_THROWS_AS(parse_design("banded"), std::invalid_argument);
  CHECK(parse_design("ma") == DesignKind::moving_average);
  CHECK(parse_design("random") == DesignKind::random_sparse);
}

TEST_CASE("multivariate normal sampling") {
  RngStream rng(71, 0);
  const Matrix x = sample_mvn(SymmetricMatrix::identity(3), 100000, rng);
  CHECK((sample_covariance(x).matrix() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.03);

  RngStream r1(72, 4), r2(72, 4);
  const SymmetricMatrix sigma = sym({{2, 0.5}, {0.5, 1}});
  CHECK(sample_mvn(sigma, 50, r1) == sample_mvn(sigma, 50, r2));

  RngStream r3(73, 0);
  const double var = sample_covariance(sample_mvn(diag({4}), 10000, r3))(0, 0);
  CHECK(var >= 3.7);
  CHECK(var <= 4.3);

  CHECK_THROWS_AS(sample_mvn(sym({{1, 2}, {2, 1}}), 5, r3), NotPositiveDefinite);
  CHECK_THROWS_AS(sample_mvn(sigma, 0, r3), std::invalid_argument);
}

TEST_CASE("replicate harness") {
  SUBCASE("known k on a diagonal truth is consistent") {
    ReplicateConfig cfg;
    cfg.design.kind = DesignKind::independent;
    cfg.design.p = 5;
    cfg.n = 10000;
    cfg.reps = 1;
    cfg.methods = {{Method::proxdist, 0.0}};
    const ReplicateTable t = run_replicates(cfg);
    CHECK(t.summaries.at(0).get("entropy_loss").mean < 0.1);
  }
  SUBCASE("same seed gives identical tables; replicates are independent streams") {
    ReplicateConfig cfg;
    cfg.design.p = 8;
    cfg.design.sparsity_frac = 0.1;
    cfg.design.seed = 3;
    cfg.n = 40;
    cfg.reps = 3;
    cfg.methods = {{Method::proxdist, std::nullopt}, {Method::hard, std::nullopt}};
    cfg.grid_size = 6;
    const ReplicateTable a = run_replicates(cfg);
    const ReplicateTable b = run_replicates(cfg);
    CHECK(a.to_csv() == b.to_csv());

    cfg.reps = 2;
    const ReplicateTable shorter = run_replicates(cfg);
    REQUIRE(shorter.records.size() == 4);
    for (std::size_t i = 0; i < shorter.records.size(); ++i) {
      CHECK(shorter.records[i].param == a.records[i].param);
      CHECK(shorter.records[i].metrics.entropy_loss == a.records[i].metrics.entropy_loss);
    }
    const std::string csv = a.to_csv();
    CHECK(csv.rfind("method,metric,mean,stderr,reps,kind,p,n,sparsity,seed\n", 0) == 0);
    const MethodSummary& prox = a.summaries.at(0);
    CHECK(prox.reps == 3);
    CHECK(prox.get("rmse").std_error >= 0.0);
    CHECK_THROWS_AS(prox.get("nope"), std::out_of_range);
  }
  SUBCASE("results do not depend on the worker count") {
    ReplicateConfig cfg;
    cfg.design.p = 6;
    cfg.design.sparsity_frac = 0.2;
    cfg.n = 30;
    cfg.reps = 2;
    cfg.methods = {{Method::soft, std::nullopt}};
    cfg.grid_size = 5;
    setenv("SPARSECOV_THREADS", "1", 1);
    CHECK(worker_count() == 1);
    const std::string one = run_replicates(cfg).to_csv();
    setenv("SPARSECOV_THREADS", "4", 1);
    CHECK(worker_count() == 4);
    const std::string four = run_replicates(cfg).to_csv();
    unsetenv("SPARSECOV_THREADS");
    CHECK(one == four);
  }
}
