#include <cstdlib>
#include <string_view>
#include <vector>

#include "kernels_impl.hpp"
#include "sparsecov/kernels.hpp"

namespace sparsecov::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

namespace {

constexpr KernelTable kScalar{Isa::scalar,           scalar::squared_diff_sum,
                              scalar::lerp,          scalar::sylvester_scale_column,
                              scalar::soft_threshold, scalar::hard_threshold};

#ifdef SPARSECOV_HAVE_AVX2_KERNELS
constexpr KernelTable kAvx2{Isa::avx2,           avx2::squared_diff_sum,
                            avx2::lerp,          avx2::sylvester_scale_column,
                            avx2::soft_threshold, avx2::hard_threshold};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
}
#endif

#ifdef SPARSECOV_HAVE_NEON_KERNELS
constexpr KernelTable kNeon{Isa::neon,           neon::squared_diff_sum,
                            neon::lerp,          neon::sylvester_scale_column,
                            neon::soft_threshold, neon::hard_threshold};
#endif

std::vector<const KernelTable*> detect() {
  std::vector<const KernelTable*> tables{&kScalar};
#ifdef SPARSECOV_HAVE_AVX2_KERNELS
  if (cpu_has_avx2()) tables.push_back(&kAvx2);
#endif
#ifdef SPARSECOV_HAVE_NEON_KERNELS
  tables.push_back(&kNeon);
#endif
  return tables;
}

const std::vector<const KernelTable*>& tables() {
  static const std::vector<const KernelTable*> t = detect();
  return t;
}

const KernelTable& select() {
  if (const char* env = std::getenv("SPARSECOV_SIMD")) {
    if (std::string_view(env) == "scalar") return kScalar;
  }
  return *tables().back();
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

std::span<const KernelTable* const> available() {
  const auto& t = tables();
  return {t.data(), t.size()};
}

}  // namespace sparsecov::kernels
