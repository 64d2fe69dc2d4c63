#pragma once

#include <cstdint>

namespace cpce {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based uniform source: the value at a counter depends only on (seed,
/// counter), so any partition of the counter range over threads reproduces the
/// same stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept;

  std::uint64_t bits(std::uint64_t counter) const noexcept;

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform(std::uint64_t counter) const noexcept;

  /// Standard normal by inversion of uniform(counter).
  double normal(std::uint64_t counter) const;

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
};

}  // namespace cpce
