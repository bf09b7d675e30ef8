// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdsim Authors
//
// Counter-style random substreams. Every stochastic quantity in a simulation
// is drawn from a stream keyed by (master seed, drop, purpose, ids...), so a
// result never depends on the order in which workers touch the streams.

#ifndef FDSIM_RANDOM_HPP
#define FDSIM_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fdsim {

enum class Purpose : std::uint64_t {
  UserDrop = 1,
  LargeScale = 2,
  SmallScale = 3,
  PhaseError = 4,
  MagnitudeError = 5,
  Temperature = 6,
  CalibrationNoise = 7,
  TraceTime = 8,
  Test = 99,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hashKey(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) noexcept {
  std::uint64_t h = mix64(seed);
  for (auto id : ids) h = mix64(h ^ mix64(id + 0x632be59bd9b4e019ULL));
  return h;
}

/// One independent random stream. Cheap to construct; copy to replay.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : engine_(key) {}

  static RandomStream derive(std::uint64_t masterSeed, std::uint64_t drop, Purpose purpose,
                             std::initializer_list<std::uint64_t> ids = {}) {
    std::uint64_t h = hashKey(masterSeed, {drop, static_cast<std::uint64_t>(purpose)});
    for (auto id : ids) h = mix64(h ^ mix64(id + 0x2545f4914f6cdd1dULL));
    return RandomStream(h);
  }

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  double exponential(double rate = 1.0) { return std::exponential_distribution<double>(rate)(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fdsim

#endif  // FDSIM_RANDOM_HPP
