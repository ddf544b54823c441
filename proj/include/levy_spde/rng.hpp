#pragma once

#include <cmath>
#include <cstdint>

namespace levy_spde::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer; a bijection on 64-bit words with good avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/**
 * @brief Counter-based random stream keyed by (seed, stream index).
 *
 * Word n of stream (seed, index) is mix64(key + (n + 1) * golden) with
 * key = mix64(seed ^ mix64(index + golden)). Streams are therefore pure
 * functions of their key: cell i of a noise grid draws from stream i no
 * matter which thread evaluates it or in what order.
 */
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t index) noexcept
      : key_(mix64(seed ^ mix64(index + kGolden))) {}

  constexpr std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
  }

  /// Uniform on the open interval (0, 1).
  double next_open01() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard exponential variate.
  double next_exponential() noexcept { return -std::log(next_open01()); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Derives an independent sub-seed for a named purpose (e.g. replicate r of a Monte Carlo loop).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix64(seed + mix64(tag ^ 0xD1B54A32D192ED03ULL));
}

}  // namespace levy_spde::rng
