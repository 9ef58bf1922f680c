#pragma once

#include <cstdint>
#include <limits>

#include "lfdrshrink/numerics.hpp"

namespace lfdrshrink {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// SplitMix64 stream keyed by (seed, stream index). Distinct indices give
// statistically independent substreams, so experiment k can be generated
// without generating experiments 0..k-1 first. Satisfies
// UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  RandomStream(std::uint64_t seed, std::uint64_t stream_index) noexcept
      : state_(mix64(seed) ^ mix64(stream_index * kGamma + 0x632BE59BD9B4E019ULL)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by inversion of a uniform draw.
  double normal() { return normal_quantile(uniform()); }

 private:
  std::uint64_t state_;
};

}  // namespace lfdrshrink
