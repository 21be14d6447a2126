#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace fbm {

/// SplitMix64 output function (Steele, Lea & Flood). Bijective on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ULL;

/// Key of sub-stream `index` under `parent`:
///   key = mix64(parent + (index + 1) * 0x9E3779B97F4A7C15)
/// Walk j of an ensemble with master seed s uses stream_key(s, j); inside a
/// walk, sub-stream 0 draws the persistence and sub-stream 1 drives the steps.
constexpr std::uint64_t stream_key(std::uint64_t parent, std::uint64_t index) {
  return mix64(parent + (index + 1) * kGolden64);
}

/// xoshiro256** seeded from a 64-bit key through SplitMix64.
///
/// uniform() returns (x >> 11) * 2^-53 in [0, 1); uniform_open() shifts by half
/// an ulp onto (0, 1). Every 64-bit output is counted in draws().
class RngStream {
 public:
  explicit constexpr RngStream(std::uint64_t key = 0) {
    std::uint64_t s = key;
    for (auto& w : state_) {
      s += kGolden64;
      w = mix64(s);
    }
  }

  constexpr std::uint64_t next_u64() {
    ++draws_;
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

  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal by the Marsaglia polar method; the spare deviate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  std::uint64_t draws() const { return draws_; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t draws_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline RngStream split(std::uint64_t parent, std::uint64_t index) {
  return RngStream(stream_key(parent, index));
}

}  // namespace fbm
