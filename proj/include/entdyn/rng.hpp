#pragma once

#include <cstdint>
#include <random>

namespace entdyn {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Derives a statistically independent seed for a
// numbered stream (sample, restart, ...) from one master seed, so every
// stream can be generated in isolation and results never depend on the
// order in which workers pick up work.
constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace entdyn
