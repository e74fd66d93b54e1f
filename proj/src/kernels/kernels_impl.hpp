#pragma once

#include <cstddef>

namespace sparsecov::kernels {

#if defined(__x86_64__) || defined(_M_X64)
#define SPARSECOV_HAVE_AVX2_KERNELS 1
namespace avx2 {
double squared_diff_sum(const double* a, const double* b, std::size_t n);
void lerp(const double* a, const double* b, double t, double* out, std::size_t n);
void sylvester_scale_column(const double* c, const double* lambda, double lambda_j, double rho,
                            double* out, std::size_t p);
void soft_threshold(const double* x, double t, double* out, std::size_t n);
void hard_threshold(const double* x, double t, double* out, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
#define SPARSECOV_HAVE_NEON_KERNELS 1
namespace neon {
double squared_diff_sum(const double* a, const double* b, std::size_t n);
void lerp(const double* a, const double* b, double t, double* out, std::size_t n);
void sylvester_scale_column(const double* c, const double* lambda, double lambda_j, double rho,
                            double* out, std::size_t p);
void soft_threshold(const double* x, double t, double* out, std::size_t n);
void hard_threshold(const double* x, double t, double* out, std::size_t n);
}  // namespace neon
#endif

}  // namespace sparsecov::kernels
