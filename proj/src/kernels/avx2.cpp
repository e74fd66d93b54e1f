// Built with -mavx2 only; dispatch guarantees it is never entered on a CPU
// without AVX2. FMA is deliberately not enabled so the elementwise kernels
// round exactly like the scalar reference.
#include "kernels_impl.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#include <cmath>

namespace sparsecov::kernels::avx2 {

namespace {
inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}
inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}
}  // namespace

double squared_diff_sum(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d, d));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void lerp(const double* a, const double* b, double t, double* out, std::size_t n) {
  const __m256d tv = _mm256_set1_pd(t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d av = _mm256_loadu_pd(a + i);
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(b + i), av);
    _mm256_storeu_pd(out + i, _mm256_add_pd(av, _mm256_mul_pd(tv, diff)));
  }
  for (; i < n; ++i) out[i] = a[i] + t * (b[i] - a[i]);
}

void sylvester_scale_column(const double* c, const double* lambda, double lambda_j, double rho,
                            double* out, std::size_t p) {
  const __m256d lj = _mm256_set1_pd(lambda_j);
  const __m256d rv = _mm256_set1_pd(rho);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= p; i += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(lambda + i), lj);
    const __m256d num = _mm256_mul_pd(_mm256_loadu_pd(c + i), prod);
    const __m256d den = _mm256_add_pd(_mm256_mul_pd(rv, prod), one);
    _mm256_storeu_pd(out + i, _mm256_div_pd(num, den));
  }
  for (; i < p; ++i) {
    const double prod = lambda[i] * lambda_j;
    out[i] = c[i] * prod / (rho * prod + 1.0);
  }
}

void soft_threshold(const double* x, double t, double* out, std::size_t n) {
  const __m256d tv = _mm256_set1_pd(t);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d mag = _mm256_sub_pd(abs_pd(xv), tv);
    const __m256d keep = _mm256_cmp_pd(mag, zero, _CMP_GT_OQ);
    const __m256d signed_mag = _mm256_or_pd(mag, _mm256_and_pd(xv, sign_mask));
    _mm256_storeu_pd(out + i, _mm256_and_pd(keep, signed_mag));
  }
  for (; i < n; ++i) {
    const double mag = std::fabs(x[i]) - t;
    out[i] = mag > 0.0 ? std::copysign(mag, x[i]) : 0.0;
  }
}

void hard_threshold(const double* x, double t, double* out, std::size_t n) {
  const __m256d tv = _mm256_set1_pd(t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d keep = _mm256_cmp_pd(abs_pd(xv), tv, _CMP_GT_OQ);
    _mm256_storeu_pd(out + i, _mm256_and_pd(keep, xv));
  }
  for (; i < n; ++i) out[i] = std::fabs(x[i]) > t ? x[i] : 0.0;
}

}  // namespace sparsecov::kernels::avx2

#endif
