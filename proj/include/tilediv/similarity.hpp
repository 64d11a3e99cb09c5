#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tilediv/pytokenizer.hpp"

namespace tilediv {

inline constexpr std::size_t kDefaultMinMatch = 5;
inline constexpr double kDefaultTau = 0.7;
// Streams longer than this use the hash-accelerated tiler.
inline constexpr std::size_t kExactTilingLimit = 10000;

struct Tile {
  std::size_t start_a = 0;
  std::size_t start_b = 0;
  std::size_t length = 0;

  friend bool operator==(const Tile&, const Tile&) = default;
};

struct MatchSet {
  std::vector<Tile> tiles;  // in marking order
  std::size_t matched_tokens = 0;

  friend bool operator==(const MatchSet&, const MatchSet&) = default;
};

using KindSpan = std::span<const std::uint8_t>;

// Greedy string tiling: repeatedly marks the longest common unmarked
// substring of length >= min_match, ties broken by smallest start in `a`,
// then in `b`. Dispatches on stream length.
MatchSet gst_match(KindSpan a, KindSpan b, std::size_t min_match = kDefaultMinMatch);
MatchSet gst_match(const TokenStream& a, const TokenStream& b,
                   std::size_t min_match = kDefaultMinMatch);

// The two tilers behind gst_match; outputs are identical.
MatchSet gst_match_exact(KindSpan a, KindSpan b, std::size_t min_match);
MatchSet gst_match_hashed(KindSpan a, KindSpan b, std::size_t min_match);

// 2 * matched / (len_a + len_b), clamped to [0, 1]. Two empty streams are
// identical (1.0).
double avg_similarity(const MatchSet& match, std::size_t len_a, std::size_t len_b);
double avg_similarity(std::size_t matched_tokens, std::size_t len_a, std::size_t len_b);

double stream_similarity(const TokenStream& a, const TokenStream& b,
                         std::size_t min_match = kDefaultMinMatch);

// Symmetric n x n similarity matrix, unit diagonal, row-major.
class SimMatrix {
 public:
  SimMatrix() = default;
  explicit SimMatrix(std::size_t n);
  SimMatrix(std::size_t n, std::vector<double> row_major);

  std::size_t n() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return scores_[i * n_ + j]; }
  // Sets both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double value);
  const std::vector<double>& data() const { return scores_; }

  SimMatrix submatrix(std::span<const std::size_t> indices) const;
  SimMatrix without(std::size_t index) const;

  friend bool operator==(const SimMatrix&, const SimMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> scores_;
};

// Text form: first line `n`, then n rows of shortest round-trip doubles.
void write_matrix_text(const SimMatrix& m, std::ostream& out);
SimMatrix read_matrix_text(std::istream& in);
// Binary form: little-endian uint64 n, then n*n little-endian float64.
void write_matrix_binary(const SimMatrix& m, std::ostream& out);
SimMatrix read_matrix_binary(std::istream& in);

// Pairs are scored independently into fixed slots, so any worker count
// gives bit-identical output.
SimMatrix pairwise_matrix(std::span<const TokenStream> group,
                          std::size_t min_match = kDefaultMinMatch, std::size_t workers = 1);

// 1 - mean off-diagonal similarity. Requires n >= 2.
double jdiv(const SimMatrix& matrix);

struct Clustering {
  std::vector<std::size_t> assignment;  // sample -> cluster id
  std::vector<std::size_t> sizes;       // cluster id -> member count
  double tau = kDefaultTau;

  std::size_t count() const { return sizes.size(); }
};

// Connected components of the graph with edges where score > tau (strict).
// Cluster ids follow the order of each cluster's smallest member.
Clustering clusters(const SimMatrix& matrix, double tau = kDefaultTau);

// exp of the Shannon entropy (natural log) of the cluster-size distribution.
double effective_clusters(const Clustering& clustering);

// Sorensen-Dice overlap of lexical token multisets.
double one_gram_similarity(std::string_view a, std::string_view b);
double one_gram_similarity(std::span<const std::string> a, std::span<const std::string> b);
SimMatrix one_gram_matrix(std::span<const std::string> sources);
// Same 1 - mean pairwise form as jdiv over one_gram_similarity.
double one_gram_div(std::span<const std::string> sources);

}  // namespace tilediv
