#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <limits>

#include "crowdc/core.hpp"

namespace crowdc {

// SplitMix64. Small, seedable, and its output is fixed by definition, so
// seeded runs reproduce bit-for-bit on every platform.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(Seed seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound), bound > 0. Rejection keeps it unbiased.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream seed from a parent seed and a list of
// coordinates. Order-sensitive; stable across platforms.
inline Seed derive_seed(Seed parent, std::initializer_list<std::uint64_t> coords) {
  SplitMix64 mix(parent ^ 0x6a09e667f3bcc909ULL);
  std::uint64_t h = mix();
  for (std::uint64_t c : coords) {
    SplitMix64 step(h ^ (c * 0x9e3779b97f4a7c15ULL + 0x3c6ef372fe94f82bULL));
    h = step();
  }
  return h;
}

inline std::uint64_t double_bits(double x) { return std::bit_cast<std::uint64_t>(x); }

}  // namespace crowdc
