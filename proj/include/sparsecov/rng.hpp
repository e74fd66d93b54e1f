#pragma once

// Reproducible random streams.
//
// std::mt19937_64 seeded with splitmix64(seed ^ splitmix64(stream_id));
// uniforms use the top 53 bits of each draw and normals use the Box-Muller
// transform (cosine branch first, sine branch cached for the next call).

#include <cstdint>
#include <optional>
#include <random>

namespace sparsecov {

std::uint64_t splitmix64(std::uint64_t x);

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n), unbiased.
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace sparsecov
