#pragma once

// Counter-derived random streams. Stream i of a master seed is independent of
// how work is split across threads, so results do not depend on worker count.

#include <cstdint>
#include <limits>

namespace negdep {

/// SplitMix64 generator; satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Stream `index` derived from `master`.
  static RandomStream derive(std::uint64_t master, std::uint64_t index) {
    RandomStream mix(master ^ (index * 0xD1B54A32D192ED03ULL));
    mix();
    return RandomStream(mix() ^ index);
  }

 private:
  std::uint64_t state_;
};

}  // namespace negdep
