#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace riccap {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of substream `stream` under `master`, a pure function of the pair so
/// that substreams can be created in any order or in parallel.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream);

/// SplitMix64 as a UniformRandomBitGenerator: 8 bytes of state, so one
/// engine per Monte Carlo path is affordable.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Standard normal draws for substream `stream` of `master`.
class NormalStream {
 public:
  NormalStream(std::uint64_t master, std::uint64_t stream);

  double next() { return normal_(engine_); }
  void fill(std::span<double> out) {
    for (double& x : out) x = normal_(engine_);
  }

 private:
  SplitMix64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace riccap
