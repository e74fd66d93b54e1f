#pragma once

// Elementwise inner loops shared by the estimators.
//
// Every kernel has a portable scalar reference in kernels::scalar and one
// vectorized variant per supported ISA. The active table is chosen once at
// first use from the host CPU; SPARSECOV_SIMD=scalar forces the reference
// path. Vector variants must agree with the scalar path to within rounding
// (exactly, for the selection-only kernels).

#include <cstddef>
#include <span>
#include <string_view>

namespace sparsecov::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  // sum_i (a_i - b_i)^2
  double (*squared_diff_sum)(const double* a, const double* b, std::size_t n);

  // out = a + t * (b - a)
  void (*lerp)(const double* a, const double* b, double t, double* out, std::size_t n);

  // Column j of a column-major p x p block: out_ij = c_ij / (rho + 1/(lambda_i lambda_j)).
  void (*sylvester_scale_column)(const double* c, const double* lambda, double lambda_j,
                                 double rho, double* out, std::size_t p);

  // out_i = sign(x_i) * max(|x_i| - t, 0)
  void (*soft_threshold)(const double* x, double t, double* out, std::size_t n);

  // out_i = x_i if |x_i| > t else 0
  void (*hard_threshold)(const double* x, double t, double* out, std::size_t n);
};

// Reference implementations. Always available.
namespace scalar {
double squared_diff_sum(const double* a, const double* b, std::size_t n);
void lerp(const double* a, const double* b, double t, double* out, std::size_t n);
void sylvester_scale_column(const double* c, const double* lambda, double lambda_j, double rho,
                            double* out, std::size_t p);
void soft_threshold(const double* x, double t, double* out, std::size_t n);
void hard_threshold(const double* x, double t, double* out, std::size_t n);
}  // namespace scalar

const KernelTable& scalar_table();

// Best table the running CPU supports (honours SPARSECOV_SIMD).
const KernelTable& active();

// Every table usable on this host, scalar first. Used by equivalence tests.
std::span<const KernelTable* const> available();

}  // namespace sparsecov::kernels
