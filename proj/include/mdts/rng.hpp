#pragma once

#include <cstdint>

namespace mdts {

// SplitMix64 finalizer: a bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based generator: the value for (seed, stream, index) depends on
// nothing else, so any region of a field can be produced independently.
constexpr std::uint64_t counter_u64(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index) noexcept {
  const std::uint64_t key = mix64(seed ^ mix64(stream * 0xD1B54A32D192ED03ULL));
  return mix64(key ^ (index * 0xA0761D6478BD642FULL));
}

// Uniform double in [0, 1) with 53 random bits.
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index) noexcept {
  return static_cast<double>(counter_u64(seed, stream, index) >> 11) * 0x1.0p-53;
}

// Seed of replicate `replicate` in grid cell `cell`:
//   mix64(master ^ mix64((cell << 32) | replicate))
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell,
                                    std::uint64_t replicate) noexcept {
  return mix64(master ^ mix64((cell << 32) | (replicate & 0xFFFFFFFFULL)));
}

// Sequential generator for test harnesses and library sampling.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_ - 0x9E3779B97F4A7C15ULL);
  }
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept {
    __extension__ typedef unsigned __int128 u128;
    const u128 wide = static_cast<u128>(next()) * bound;
    return static_cast<std::uint64_t>(wide >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace mdts
