#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace palzone {

/// Stateless counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so parallel or reordered consumers reproduce the
/// same numbers. Mixing is SplitMix64's finalizer applied in a chain.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(mix(seed) ^ (stream * 0xD1B54A32D192ED03ULL))) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t counter) const { return mix(key_ ^ mix(counter)); }

  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on counters 2c and 2c + 1.
  double normal(std::uint64_t counter) const {
    const double u1 = uniform(2 * counter);
    const double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Circularly-symmetric complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_normal(std::uint64_t counter) const {
    return std::complex<double>(normal(2 * counter), normal(2 * counter + 1)) * std::numbers::sqrt2 * 0.5;
  }

 private:
  std::uint64_t key_;
};

}  // namespace palzone
