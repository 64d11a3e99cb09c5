#include <algorithm>
#include <unordered_map>

#include "tilediv/similarity.hpp"

namespace tilediv {

namespace {

struct Marks {
  std::vector<bool> a;
  std::vector<bool> b;

  Marks(std::size_t la, std::size_t lb) : a(la, false), b(lb, false) {}

  bool occluded(const Tile& t) const {
    for (std::size_t k = 0; k < t.length; ++k) {
      if (a[t.start_a + k] || b[t.start_b + k]) return true;
    }
    return false;
  }

  void mark(const Tile& t) {
    for (std::size_t k = 0; k < t.length; ++k) {
      a[t.start_a + k] = true;
      b[t.start_b + k] = true;
    }
  }
};

bool tile_order(const Tile& x, const Tile& y) {
  return x.start_a != y.start_a ? x.start_a < y.start_a : x.start_b < y.start_b;
}

// Marks candidates of the current maximal length in (start_a, start_b)
// order. Returns false when tiling should stop.
bool mark_round(std::vector<Tile>& candidates, std::size_t best, std::size_t min_match,
                Marks& marks, MatchSet& result) {
  if (candidates.empty()) return false;
  std::sort(candidates.begin(), candidates.end(), tile_order);
  for (const auto& tile : candidates) {
    if (marks.occluded(tile)) continue;
    marks.mark(tile);
    result.tiles.push_back(tile);
    result.matched_tokens += tile.length;
  }
  return best > min_match;
}

}  // namespace

MatchSet gst_match_exact(KindSpan a, KindSpan b, std::size_t min_match) {
  min_match = std::max<std::size_t>(min_match, 1);
  MatchSet result;
  const std::size_t la = a.size();
  const std::size_t lb = b.size();
  if (la < min_match || lb < min_match) return result;

  // Maximal equal-kind diagonal runs long enough to host a tile. Marking
  // only ever splits these runs, so every later round scans them alone.
  std::vector<Tile> runs;
  for (std::size_t d = 0; d + 1 < la + lb; ++d) {
    std::size_t p = d < lb ? 0 : d - lb + 1;
    std::size_t q = d < lb ? lb - 1 - d : 0;
    std::size_t run_start = 0;
    std::size_t len = 0;
    for (; p < la && q < lb; ++p, ++q) {
      if (a[p] == b[q]) {
        if (len == 0) run_start = p;
        ++len;
      } else {
        if (len >= min_match) runs.push_back({run_start, run_start + q - p, len});
        len = 0;
      }
    }
    if (len >= min_match) runs.push_back({run_start, run_start + q - p, len});
  }

  Marks marks(la, lb);
  std::vector<Tile> candidates;
  while (true) {
    std::size_t best = min_match;
    candidates.clear();
    for (const auto& run : runs) {
      std::size_t k = 0;
      while (k < run.length) {
        while (k < run.length && (marks.a[run.start_a + k] || marks.b[run.start_b + k])) ++k;
        const std::size_t seg = k;
        while (k < run.length && !marks.a[run.start_a + k] && !marks.b[run.start_b + k]) ++k;
        const std::size_t len = k - seg;
        if (len < best) continue;
        if (len > best) {
          best = len;
          candidates.clear();
        }
        candidates.push_back({run.start_a + seg, run.start_b + seg, len});
      }
    }
    if (!mark_round(candidates, best, min_match, marks, result)) break;
  }
  return result;
}

namespace {

constexpr std::uint64_t kHashBase = 0x100000001B3ULL;

class WindowHasher {
 public:
  explicit WindowHasher(KindSpan s) : prefix_(s.size() + 1, 0), power_(s.size() + 1, 1) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      prefix_[i + 1] = prefix_[i] * kHashBase + (static_cast<std::uint64_t>(s[i]) + 1);
      power_[i + 1] = power_[i] * kHashBase;
    }
  }

  std::uint64_t window(std::size_t start, std::size_t len) const {
    return prefix_[start + len] - prefix_[start] * power_[len];
  }

 private:
  std::vector<std::uint64_t> prefix_;
  std::vector<std::uint64_t> power_;
};

// For each position, the number of consecutive unmarked positions from it.
std::vector<std::size_t> free_run(const std::vector<bool>& marked) {
  std::vector<std::size_t> run(marked.size() + 1, 0);
  for (std::size_t i = marked.size(); i-- > 0;) run[i] = marked[i] ? 0 : run[i + 1] + 1;
  return run;
}

// All (p, q) whose unmarked windows of length `len` are equal. Stops at the
// first hit when `first_only`.
std::vector<Tile> equal_windows(KindSpan a, KindSpan b, const WindowHasher& ha,
                                const WindowHasher& hb, const std::vector<std::size_t>& free_a,
                                const std::vector<std::size_t>& free_b, std::size_t len,
                                bool first_only) {
  std::vector<Tile> hits;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> table;
  for (std::size_t p = 0; p + len <= a.size(); ++p) {
    if (free_a[p] >= len) table[ha.window(p, len)].push_back(p);
  }
  if (table.empty()) return hits;
  for (std::size_t q = 0; q + len <= b.size(); ++q) {
    if (free_b[q] < len) continue;
    auto it = table.find(hb.window(q, len));
    if (it == table.end()) continue;
    for (std::size_t p : it->second) {
      if (std::equal(a.begin() + p, a.begin() + p + len, b.begin() + q)) {
        hits.push_back({p, q, len});
        if (first_only) return hits;
      }
    }
  }
  return hits;
}

}  // namespace

MatchSet gst_match_hashed(KindSpan a, KindSpan b, std::size_t min_match) {
  min_match = std::max<std::size_t>(min_match, 1);
  MatchSet result;
  if (a.size() < min_match || b.size() < min_match) return result;
  const WindowHasher ha(a);
  const WindowHasher hb(b);
  Marks marks(a.size(), b.size());
  while (true) {
    const auto free_a = free_run(marks.a);
    const auto free_b = free_run(marks.b);
    auto exists = [&](std::size_t len) {
      return !equal_windows(a, b, ha, hb, free_a, free_b, len, true).empty();
    };
    if (!exists(min_match)) break;
    std::size_t lo = min_match;
    std::size_t hi = std::min(*std::max_element(free_a.begin(), free_a.end()),
                              *std::max_element(free_b.begin(), free_b.end()));
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo + 1) / 2;
      if (exists(mid)) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    auto candidates = equal_windows(a, b, ha, hb, free_a, free_b, lo, false);
    if (!mark_round(candidates, lo, min_match, marks, result)) break;
  }
  return result;
}

MatchSet gst_match(KindSpan a, KindSpan b, std::size_t min_match) {
  if (std::max(a.size(), b.size()) <= kExactTilingLimit) return gst_match_exact(a, b, min_match);
  return gst_match_hashed(a, b, min_match);
}

MatchSet gst_match(const TokenStream& a, const TokenStream& b, std::size_t min_match) {
  return gst_match(a.kinds(), b.kinds(), min_match);
}

double avg_similarity(std::size_t matched_tokens, std::size_t len_a, std::size_t len_b) {
  if (len_a == 0 && len_b == 0) return 1.0;
  const double score = 2.0 * static_cast<double>(matched_tokens) /
                       static_cast<double>(len_a + len_b);
  return std::clamp(score, 0.0, 1.0);
}

double avg_similarity(const MatchSet& match, std::size_t len_a, std::size_t len_b) {
  return avg_similarity(match.matched_tokens, len_a, len_b);
}

double stream_similarity(const TokenStream& a, const TokenStream& b, std::size_t min_match) {
  return avg_similarity(gst_match(a, b, min_match), a.size(), b.size());
}

}  // namespace tilediv
