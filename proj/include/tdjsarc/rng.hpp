#pragma once

#include <cstdint>
#include <random>

namespace tdjsarc {

using Rng = std::mt19937_64;

// Stream identifiers for deriving independent seeds from one master seed.
enum class Stream : std::uint64_t {
  TrainTrack = 1,
  ValidationTrack = 2,
  PolicyInit = 3,
  Rollout = 4,
  Minibatch = 5,
  EvalTrack = 6,
  RandomBaseline = 7,
  SweepTrack = 8,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seed for item `index` of `stream` under `master`. Fixed splitting: the
// same triple always yields the same seed.
inline std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
  return splitmix64(splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(stream))) + index);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace tdjsarc
