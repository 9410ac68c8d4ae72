#pragma once

#include <cstdint>
#include <limits>

namespace regsamp {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Purpose tags keep streams for different uses of one master seed apart.
enum class SeedPurpose : std::uint64_t {
  kSrs = 0x5352'5300,
  kRss = 0x5253'5300,
  kCandidate = 0x4341'4e44,
  kSynthetic = 0x5359'4e54,
  kCoverage = 0x434f'5652,
};

/// Seed for trial `index` of `purpose` under `master`:
///   mix64(mix64(mix64(master) ^ purpose) + index)
/// Pure, so any trial can be reproduced in isolation and in any order.
constexpr std::uint64_t derive_seed(std::uint64_t master, SeedPurpose purpose,
                                    std::uint64_t index) noexcept {
  return mix64(mix64(mix64(master) ^ static_cast<std::uint64_t>(purpose)) + index);
}

/// SplitMix64 stream; satisfies UniformRandomBitGenerator. Used instead of
/// the std distributions because their output is implementation-defined.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound), bound > 0. Lemire's multiply-shift with
  /// rejection, so exactly unbiased.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Standard normal deviate (Marsaglia polar method, no cached spare).
  double normal() noexcept;

 private:
  std::uint64_t state_;
};

}  // namespace regsamp
