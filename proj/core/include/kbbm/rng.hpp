#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace kbbm {

/// SplitMix64 finaliser; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Stream key of particle `id` under master seed `seed`.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t id) { return mix64(seed ^ mix64(id)); }

/// Lineage identifier of the `ordinal`-th child of `parent`.
constexpr std::uint64_t child_id(std::uint64_t parent, std::uint64_t ordinal) {
  return mix64(parent * 0xD1342543DE82EF95ULL + mix64(ordinal + 1));
}

/// Master seed of the i-th independent replicate of a run seeded `seed`.
constexpr std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t i) { return mix64(seed ^ mix64(i + 1)); }

/// Philox4x32-10 block cipher: maps (key, counter) to 128 random bits.
constexpr std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                                   std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53U;
  constexpr std::uint32_t kM1 = 0xCD9E8D57U;
  constexpr std::uint32_t kW0 = 0x9E3779B9U;
  constexpr std::uint32_t kW1 = 0xBB67AE85U;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

/// Counter-based random stream. The n-th 64-bit draw is a pure function of
/// (key, n), so a stream can be suspended as (key, position) and resumed.
class Stream {
 public:
  explicit Stream(std::uint64_t key, std::uint64_t position = 0) : key_(key), position_(position) {}

  std::uint64_t position() const { return position_; }

  std::uint64_t next_u64() {
    const std::uint64_t block = position_ >> 1;
    const std::array<std::uint32_t, 4> out =
        philox4x32({static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), 0U, 0U},
                   {static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)});
    const std::size_t half = (position_ & 1U) * 2;
    ++position_;
    return (static_cast<std::uint64_t>(out[half]) << 32) | out[half + 1];
  }

  /// Uniform on (0, 1); never returns 0 or 1.
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  /// Standard normal by Box-Muller (one variate per two uniforms).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t position_;
};

}  // namespace kbbm
