#pragma once

// Seeded pseudo-random streams with cheap, collision-resistant substream
// derivation.  Substreams keyed on (seed, index) make row-parallel data
// generation deterministic regardless of thread scheduling.

#include <cstdint>

namespace cmoments {

/// Finalizing 64-bit mixer (murmur3 variant); bijective.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xFF51AFD7ED558CCDull;
  z ^= z >> 33;
  z *= 0xC4CEB9FE1A85EC53ull;
  z ^= z >> 33;
  return z;
}

/// SplitMix64 generator.  64-bit state, period 2^64.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double strictly inside (0, 1); never returns an endpoint, so
  /// quantile transforms stay finite.
  double uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Independent substream for (seed, index); e.g. one stream per dataset row.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(mix64(seed + 0x9E3779B97F4A7C15ull * (index + 1)));
}

}  // namespace cmoments
