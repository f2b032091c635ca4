#pragma once

#include <array>
#include <cstdint>

#include "paradox/errors.hpp"
#include "paradox/rational.hpp"

namespace paradox {

/// Deterministic 64-bit random source (xoshiro256** with splitmix64 seeding).
///
/// Hand-rolled rather than <random> because the standard distributions are
/// not pinned down across implementations; this generator produces the same
/// draw sequence for the same seed on every platform. One source per
/// simulated run; parallel runs take independently derived seeds
/// (seed_i = base_seed + i).
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform integer in [0, n), each value with probability exactly 1/n.
  /// Rejection sampling on the top bits; no modulo bias.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw Error("uniform_below(0)");
    if (n == 1) return 0;
    const std::uint64_t mask = mask_for(n - 1);
    for (;;) {
      const std::uint64_t r = next_u64() & mask;
      if (r < n) return r;
    }
  }

  /// Arbitrary-precision variant, for common denominators beyond 64 bits.
  BigInt uniform_below(const BigInt& n) {
    if (n <= 0) throw Error("uniform_below of non-positive bound");
    if (n <= std::uint64_t{0xffffffffffffffffULL}) {
      return BigInt(uniform_below(static_cast<std::uint64_t>(n)));
    }
    const unsigned bits = static_cast<unsigned>(msb(n)) + 1;
    const unsigned words = (bits + 63) / 64;
    const unsigned top_shift = words * 64 - bits;
    for (;;) {
      BigInt r = 0;
      for (unsigned i = 0; i < words; ++i) {
        r <<= 64;
        r |= BigInt(next_u64());
      }
      r >>= top_shift;
      if (r < n) return r;
    }
  }

  /// Uniform double in [0, 1): 53 random mantissa bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  // Smallest all-ones mask covering v.
  static std::uint64_t mask_for(std::uint64_t v) {
    std::uint64_t m = v;
    m |= m >> 1;
    m |= m >> 2;
    m |= m >> 4;
    m |= m >> 8;
    m |= m >> 16;
    m |= m >> 32;
    return m;
  }

  std::array<std::uint64_t, 4> state_;
  std::uint64_t seed_;
};

}  // namespace paradox
