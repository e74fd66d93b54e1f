#include "kernels_impl.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

#include <cmath>

namespace sparsecov::kernels::neon {

double squared_diff_sum(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    acc0 = vaddq_f64(acc0, vmulq_f64(d0, d0));
    acc1 = vaddq_f64(acc1, vmulq_f64(d1, d1));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void lerp(const double* a, const double* b, double t, double* out, std::size_t n) {
  const float64x2_t tv = vdupq_n_f64(t);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t av = vld1q_f64(a + i);
    const float64x2_t diff = vsubq_f64(vld1q_f64(b + i), av);
    vst1q_f64(out + i, vaddq_f64(av, vmulq_f64(tv, diff)));
  }
  for (; i < n; ++i) out[i] = a[i] + t * (b[i] - a[i]);
}

void sylvester_scale_column(const double* c, const double* lambda, double lambda_j, double rho,
                            double* out, std::size_t p) {
  const float64x2_t lj = vdupq_n_f64(lambda_j);
  const float64x2_t rv = vdupq_n_f64(rho);
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + 2 <= p; i += 2) {
    const float64x2_t prod = vmulq_f64(vld1q_f64(lambda + i), lj);
    const float64x2_t num = vmulq_f64(vld1q_f64(c + i), prod);
    const float64x2_t den = vaddq_f64(vmulq_f64(rv, prod), one);
    vst1q_f64(out + i, vdivq_f64(num, den));
  }
  for (; i < p; ++i) {
    const double prod = lambda[i] * lambda_j;
    out[i] = c[i] * prod / (rho * prod + 1.0);
  }
}

void soft_threshold(const double* x, double t, double* out, std::size_t n) {
  const float64x2_t tv = vdupq_n_f64(t);
  const float64x2_t zero = vdupq_n_f64(0.0);
  const uint64x2_t sign_mask = vdupq_n_u64(0x8000000000000000ULL);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xv = vld1q_f64(x + i);
    const float64x2_t mag = vsubq_f64(vabsq_f64(xv), tv);
    const uint64x2_t keep = vcgtq_f64(mag, zero);
    const uint64x2_t signed_mag =
        vorrq_u64(vreinterpretq_u64_f64(mag), vandq_u64(vreinterpretq_u64_f64(xv), sign_mask));
    vst1q_f64(out + i, vreinterpretq_f64_u64(vandq_u64(keep, signed_mag)));
  }
  for (; i < n; ++i) {
    const double mag = std::fabs(x[i]) - t;
    out[i] = mag > 0.0 ? std::copysign(mag, x[i]) : 0.0;
  }
}

void hard_threshold(const double* x, double t, double* out, std::size_t n) {
  const float64x2_t tv = vdupq_n_f64(t);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xv = vld1q_f64(x + i);
    const uint64x2_t keep = vcgtq_f64(vabsq_f64(xv), tv);
    vst1q_f64(out + i, vreinterpretq_f64_u64(vandq_u64(keep, vreinterpretq_u64_f64(xv))));
  }
  for (; i < n; ++i) out[i] = std::fabs(x[i]) > t ? x[i] : 0.0;
}

}  // namespace sparsecov::kernels::neon

#endif
