#pragma once

#include <cstdint>
#include <random>

namespace tilediv {

// SplitMix64 finalizer. Used to derive independent per-stream seeds from a
// (seed, stream index) pair so parallel and sequential runs draw identically.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

using Engine = std::mt19937_64;

// std::uniform_*_distribution output is implementation-defined; these two
// helpers keep seeded draws identical across standard libraries.

// Uniform integer in [0, bound), bound > 0. Lemire's multiply-shift with
// rejection.
inline std::uint64_t draw_index(Engine& engine, std::uint64_t bound) {
  unsigned __int128 product =
      static_cast<unsigned __int128>(engine()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(engine()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

// Uniform double in [0, 1) with 53 random bits.
inline double draw_unit(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace tilediv
