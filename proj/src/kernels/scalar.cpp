#include "sparsecov/kernels.hpp"

#include <cmath>

namespace sparsecov::kernels::scalar {

double squared_diff_sum(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void lerp(const double* a, const double* b, double t, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + t * (b[i] - a[i]);
}

void sylvester_scale_column(const double* c, const double* lambda, double lambda_j, double rho,
                            double* out, std::size_t p) {
  // c / (rho + 1/(li lj)) rewritten as c * li lj / (rho li lj + 1)
  for (std::size_t i = 0; i < p; ++i) {
    const double prod = lambda[i] * lambda_j;
    out[i] = c[i] * prod / (rho * prod + 1.0);
  }
}

void soft_threshold(const double* x, double t, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double mag = std::fabs(x[i]) - t;
    out[i] = mag > 0.0 ? std::copysign(mag, x[i]) : 0.0;
  }
}

void hard_threshold(const double* x, double t, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(x[i]) > t ? x[i] : 0.0;
}

}  // namespace sparsecov::kernels::scalar
