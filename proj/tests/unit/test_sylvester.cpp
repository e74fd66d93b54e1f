#include <doctest.h>

#include "helpers.hpp"
#include "sparsecov/sylvester.hpp"

using namespace sparsecov;
using namespace sparsecov::sylvester;
using namespace testutil;

TEST_CASE("spectral solve: closed-form cases") {
  RngStream rng(21, 0);
  const SymmetricMatrix c = random_symmetric(4, rng);
  const SymmetricMatrix half = solve_spectral({SymmetricMatrix::identity(4), c, 1.0});
  CHECK((half.matrix() - c.matrix() / 2.0).norm() < 1e-14);

  const SymmetricMatrix x = solve_spectral({diag({1, 2}), diag({3, 6}), 1.0});
  CHECK((x.matrix() - diag({1.5, 4.8}).matrix()).norm() < 1e-14);
}

TEST_CASE("spectral solve matches the Kronecker oracle") {
  RngStream rng(22, 0);
  const SurrogateSystem five{random_spd(5, rng), random_symmetric(5, rng), 0.7};
  CHECK(rel_diff(solve_spectral(five).matrix(), solve_kronecker(five).matrix()) < 1e-8);

  for (int t = 0; t < 50; ++t) {
    const Index p = 2 + static_cast<Index>(rng.below(7));
    const SurrogateSystem sys{random_spd(p, rng, 0.05 + rng.uniform()), random_symmetric(p, rng),
                              std::exp(rng.uniform(-4.0, 4.0))};
    const SymmetricMatrix a = solve_spectral(sys);
    const SymmetricMatrix b = solve_kronecker(sys);
    CHECK((a.matrix() - b.matrix()).norm() <= 1e-8 * std::max(1.0, b.frobenius_norm()));
    CHECK(residual(sys, a) <= 1e-8 * std::max(1.0, sys.c_k.frobenius_norm()));
    CHECK(a.matrix() == a.matrix().transpose());
  }
}

TEST_CASE("Kronecker solve") {
  const SymmetricMatrix quarter =
      solve_kronecker({SymmetricMatrix::identity(2), SymmetricMatrix::identity(2), 3.0});
  CHECK((quarter.matrix() - 0.25 * Matrix::Identity(2, 2)).norm() < 1e-15);

  const SymmetricMatrix off =
      solve_kronecker({SymmetricMatrix::identity(2), sym({{0, 1}, {1, 0}}), 1.0});
  CHECK((off.matrix() - sym({{0, 0.5}, {0.5, 0}}).matrix()).norm() < 1e-15);

  RngStream rng(23, 0);
  const SurrogateSystem sys{random_spd(4, rng), random_symmetric(4, rng), 1.3};
  CHECK(residual(sys, solve_kronecker(sys)) < 1e-10);

  CHECK_THROWS_AS(solve_kronecker({SymmetricMatrix::identity(kKroneckerMaxDim + 1),
                                   SymmetricMatrix::identity(kKroneckerMaxDim + 1), 1.0}),
                  std::invalid_argument);
}

TEST_CASE("invalid systems are rejected") {
  const SymmetricMatrix c = SymmetricMatrix::identity(2);
  CHECK_THROWS_AS(solve_spectral({sym({{1, 2}, {2, 1}}), c, 1.0}), NotPositiveDefinite);
  CHECK_THROWS_AS(solve_spectral({c, c, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(solve_spectral({c, c, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(solve_spectral({c, SymmetricMatrix::identity(3), 1.0}), std::invalid_argument);
}

TEST_CASE("solution commutes with transposition and scales linearly in C") {
  RngStream rng(24, 0);
  const SymmetricMatrix a = random_spd(6, rng);
  const SymmetricMatrix c = random_symmetric(6, rng);
  const SymmetricMatrix x = solve_spectral({a, c, 0.9});
  const SymmetricMatrix xt =
      solve_spectral({a, SymmetricMatrix(Matrix(c.matrix().transpose())), 0.9});
  CHECK(x == xt);
  const SymmetricMatrix x3 = solve_spectral({a, 3.0 * c, 0.9});
  CHECK(rel_diff(x3.matrix(), 3.0 * x.matrix()) < 1e-12);
}

TEST_CASE("large rho drives the solution to the projected target") {
  RngStream rng(25, 0);
  const SymmetricMatrix a = random_spd(5, rng);
  const SymmetricMatrix target = random_symmetric(5, rng);
  const SymmetricMatrix b = random_spd(5, rng);
  double prev = 0.0;
  for (double rho : {1e2, 1e4, 1e6}) {
    const SymmetricMatrix x = solve_spectral({a, rho * target + b, rho});
    const double err = (x.matrix() - target.matrix()).norm();
    if (prev > 0.0) CHECK(err < prev / 50.0);  // roughly 1/rho
    prev = err;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("fixed-point iteration") {
  RngStream rng(26, 0);
  const SymmetricMatrix c = random_symmetric(3, rng);
  const SymmetricMatrix x =
      solve_fixed_point({SymmetricMatrix::identity(3), c, 4.0}, 1e-13, 500);
  CHECK((x.matrix() - c.matrix() / 5.0).norm() < 1e-12);

  CHECK_THROWS_AS(solve_fixed_point({SymmetricMatrix::identity(3), c, 0.5}, 1e-12, 1000),
                  NoConvergence);

  for (int t = 0; t < 10; ++t) {
    const SymmetricMatrix a = random_spd(5, rng);
    const double inv_norm2 = 1.0 / spectral_decompose(a).eigenvalues(0);
    const SurrogateSystem sys{a, random_symmetric(5, rng), 2.0 * inv_norm2 * inv_norm2};
    const SymmetricMatrix fp = solve_fixed_point(sys, 1e-12, 10000);
    CHECK(rel_diff(fp.matrix(), solve_spectral(sys).matrix()) < 1e-8);
  }

  try {
    solve_fixed_point({SymmetricMatrix::identity(2), random_symmetric(2, rng), 0.5}, 1e-12, 1000);
    FAIL("expected NoConvergence");
  } catch (const NoConvergence& e) {
    CHECK(e.residual() > 0.0);
  }
}
