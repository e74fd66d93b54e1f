#pragma once

#include <cmath>

#include "sparsecov/matcore.hpp"
#include "sparsecov/rng.hpp"

namespace testutil {

using sparsecov::Index;
using sparsecov::Matrix;
using sparsecov::SymmetricMatrix;
using sparsecov::Vector;

inline Matrix gaussian(Index rows, Index cols, sparsecov::RngStream& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline SymmetricMatrix random_symmetric(Index p, sparsecov::RngStream& rng) {
  const Matrix g = gaussian(p, p, rng);
  return SymmetricMatrix::symmetrized(g + g.transpose());
}

// G G^T / p + shift I.
inline SymmetricMatrix random_spd(Index p, sparsecov::RngStream& rng, double shift = 0.5) {
  const Matrix g = gaussian(p, p, rng);
  Matrix m = g * g.transpose() / static_cast<double>(p);
  m.diagonal().array() += shift;
  return SymmetricMatrix::symmetrized(m);
}

inline SymmetricMatrix sym(std::initializer_list<std::initializer_list<double>> rows) {
  const auto p = static_cast<Index>(rows.size());
  Matrix m(p, p);
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return SymmetricMatrix(m);
}

inline SymmetricMatrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return SymmetricMatrix::diagonal(v);
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace testutil
