#pragma once

#include <cmath>
#include <cstdint>

namespace fintime::detail {

// splitmix64: tiny, fully deterministic across platforms, good enough for
// quasi-random frame seeding.  Not for cryptography.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (avoids std::normal_distribution, whose
  // stream is implementation-defined).
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
};

inline constexpr std::uint64_t kDefaultSeed = 0x6a09e667f3bcc908ULL;

}  // namespace fintime::detail
