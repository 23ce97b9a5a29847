#pragma once

#include <cstdint>
#include <limits>

namespace cubeslice {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator, so it plugs
/// into the <random> distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state = 0) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

using Rng = SplitMix64;

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xFF51AFD7ED558CCDULL;
  x ^= x >> 33;
  x *= 0xC4CEB9FE1A85EC53ULL;
  x ^= x >> 33;
  return x;
}

/// Generator for the independent substream `index` of `seed`. Monte Carlo
/// estimators draw sample i from substream(seed, i), which makes every
/// estimate independent of how samples are distributed across workers.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
  return Rng(mix64(seed ^ mix64(index + 0x632BE59BD9B4E019ULL)));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cubeslice
