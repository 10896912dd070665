#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace siegel {

/// Counter-based stream: output i is mix64(key + (i + 1) * gamma), the
/// SplitMix64 construction. Streams for independent paths are derived with
/// split(), so a path's draws depend only on (master seed, path index).
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed) : key_(mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ + (++counter_) * kGamma); }

  /// Independent child stream keyed by index; does not advance this stream.
  CounterRng split(std::uint64_t index) const {
    CounterRng child(0);
    child.key_ = mix64(key_ ^ mix64(index + 0x9e3779b97f4a7c15ULL));
    child.counter_ = 0;
    return child;
  }

  std::uint64_t counter() const noexcept { return counter_; }

  static constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Standard normal draws from a CounterRng.
class GaussianSource {
 public:
  explicit GaussianSource(CounterRng rng) : rng_(rng) {}

  double operator()() { return normal_(rng_); }

  void fill(std::span<double> out) {
    for (double& x : out) x = normal_(rng_);
  }

 private:
  CounterRng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace siegel
