#pragma once
// Slow, literal reference implementations used only by the tests.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace oracle {

struct Tile {
  std::size_t a, b, len;
};

// Greedy string tiling one tile at a time: find the longest common
// unmarked substring by direct comparison at every (i, j), first in
// (i, j) order, mark it, repeat.
inline std::vector<Tile> gst(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b,
                             std::size_t min_match) {
  std::vector<bool> ma(a.size(), false), mb(b.size(), false);
  std::vector<Tile> tiles;
  while (true) {
    Tile best{0, 0, 0};
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        std::size_t k = 0;
        while (i + k < a.size() && j + k < b.size() && !ma[i + k] && !mb[j + k] && a[i + k] == b[j + k]) ++k;
        if (k > best.len) best = {i, j, k};
      }
    }
    if (best.len < min_match || best.len == 0) break;
    for (std::size_t k = 0; k < best.len; ++k) ma[best.a + k] = mb[best.b + k] = true;
    tiles.push_back(best);
  }
  return tiles;
}

inline std::size_t matched(const std::vector<Tile>& tiles) {
  std::size_t total = 0;
  for (const auto& t : tiles) total += t.len;
  return total;
}

// Fraction of k-subsets of n items with at least one of the first m.
inline double pass_at_k(std::size_t n, std::size_t m, std::size_t k) {
  std::uint64_t hit = 0, all = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    ++all;
    if (mask & ((1u << m) - 1)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(all);
}

}  // namespace oracle
