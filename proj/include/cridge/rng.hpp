#pragma once

#include <cstdint>
#include <random>

namespace cridge {

/// SplitMix64 finalizer; decorrelates nearby integer seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of replicate `replicate` in grid cell `cell`: seed ^ (cell << 20) ^ replicate.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t cell,
                                       std::uint64_t replicate) {
  return seed ^ (cell << 20) ^ replicate;
}

/// Gaussian/uniform source. One instance per worker; never shared.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace cridge
