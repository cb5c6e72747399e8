#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace tvls {

/// Counter-based generator: a SplitMix64 stream whose starting state is a hash
/// of an arbitrary key tuple, e.g. (seed, path, interval). Two streams with
/// different keys are statistically independent, so grids can be refined or
/// sampled in parallel without sharing state.
class CounterRng {
 public:
  explicit CounterRng(std::initializer_list<std::uint64_t> key) : state_(0x243f6a8885a308d3ULL) {
    for (std::uint64_t k : key) state_ = mix(state_ ^ mix(k + 0x9e3779b97f4a7c15ULL));
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal via Box-Muller, one draw per call.
  double normal() {
    constexpr double two_pi = 6.283185307179586476925;
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  /// Poisson count by sequential inversion; large means are split into chunks
  /// (sum of independent Poisson variables), which keeps the draw exact.
  std::uint64_t poisson(double mean) {
    std::uint64_t count = 0;
    constexpr double chunk = 32.0;
    while (mean > chunk) {
      count += poisson_small(chunk);
      mean -= chunk;
    }
    return count + poisson_small(mean);
  }

 private:
  std::uint64_t poisson_small(double mean) {
    if (mean <= 0.0) return 0;
    double p = std::exp(-mean);
    double cdf = p;
    const double u = uniform();
    std::uint64_t k = 0;
    while (u > cdf && p > 0.0) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

  std::uint64_t state_;
};

/// Per-path seed derived from a run seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return CounterRng::mix(CounterRng::mix(seed ^ 0x5851f42d4c957f2dULL) + index);
}

}  // namespace tvls
