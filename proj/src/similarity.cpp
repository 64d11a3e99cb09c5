#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tilediv/error.hpp"
#include "tilediv/ingest.hpp"
#include "tilediv/parallel.hpp"
#include "tilediv/similarity.hpp"

namespace tilediv {

SimMatrix::SimMatrix(std::size_t n) : n_(n), scores_(n * n, 0.0) {
  for (std::size_t i = 0; i < n; ++i) scores_[i * n + i] = 1.0;
}

SimMatrix::SimMatrix(std::size_t n, std::vector<double> row_major)
    : n_(n), scores_(std::move(row_major)) {
  if (scores_.size() != n * n) {
    throw Error(ErrorKind::kInvalidArgument, "similarity matrix needs n*n entries");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = scores_[i * n + j];
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorKind::kDomain, "similarity outside [0, 1] at (" + std::to_string(i) +
                                            ", " + std::to_string(j) + ")");
      }
      if (v != scores_[j * n + i]) {
        throw Error(ErrorKind::kDomain, "similarity matrix is not symmetric");
      }
    }
    if (scores_[i * n + i] != 1.0) {
      throw Error(ErrorKind::kDomain, "similarity matrix diagonal must be 1");
    }
  }
}

void SimMatrix::set(std::size_t i, std::size_t j, double value) {
  scores_[i * n_ + j] = value;
  scores_[j * n_ + i] = value;
}

SimMatrix SimMatrix::submatrix(std::span<const std::size_t> indices) const {
  SimMatrix sub(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    for (std::size_t c = 0; c < indices.size(); ++c) {
      sub.scores_[r * sub.n_ + c] = (*this)(indices[r], indices[c]);
    }
  }
  return sub;
}

SimMatrix SimMatrix::without(std::size_t index) const {
  std::vector<std::size_t> keep;
  keep.reserve(n_ > 0 ? n_ - 1 : 0);
  for (std::size_t i = 0; i < n_; ++i) {
    if (i != index) keep.push_back(i);
  }
  return submatrix(keep);
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int k = 0; k < 8; ++k) bytes[k] = static_cast<char>((v >> (8 * k)) & 0xFF);
  out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw Error(ErrorKind::kParse, "truncated binary similarity matrix");
  }
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
  return v;
}

}  // namespace

void write_matrix_text(const SimMatrix& m, std::ostream& out) {
  out << m.n() << '\n';
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t j = 0; j < m.n(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

SimMatrix read_matrix_text(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kParse, "empty similarity matrix");
  std::size_t n = 0;
  auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), n);
  if (ec != std::errc{}) throw Error(ErrorKind::kParse, "bad matrix header: " + line);
  std::vector<double> values;
  values.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw Error(ErrorKind::kParse, "truncated similarity matrix");
    const char* cur = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t j = 0; j < n; ++j) {
      while (cur < end && *cur == ' ') ++cur;
      double v = 0.0;
      auto [next, err] = std::from_chars(cur, end, v);
      if (err != std::errc{}) {
        throw Error(ErrorKind::kParse, "bad matrix entry on row " + std::to_string(i));
      }
      values.push_back(v);
      cur = next;
    }
  }
  return SimMatrix(n, std::move(values));
}

void write_matrix_binary(const SimMatrix& m, std::ostream& out) {
  put_u64(out, m.n());
  for (double v : m.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
}

SimMatrix read_matrix_binary(std::istream& in) {
  const auto n = static_cast<std::size_t>(get_u64(in));
  std::vector<double> values(n * n);
  for (auto& v : values) v = std::bit_cast<double>(get_u64(in));
  return SimMatrix(n, std::move(values));
}

SimMatrix pairwise_matrix(std::span<const TokenStream> group, std::size_t min_match,
                          std::size_t workers) {
  const std::size_t n = group.size();
  SimMatrix matrix(n);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - (n > 0 ? 1 : 0)) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> scores(pairs.size());
  parallel_for(pairs.size(), workers, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    scores[k] = stream_similarity(group[i], group[j], min_match);
  });
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    matrix.set(pairs[k].first, pairs[k].second, scores[k]);
  }
  return matrix;
}

double jdiv(const SimMatrix& matrix) {
  const std::size_t n = matrix.n();
  if (n < 2) throw Error(ErrorKind::kDomain, "JDiv undefined for groups smaller than 2");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) total += matrix(i, j);
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return std::clamp(1.0 - total / pairs, 0.0, 1.0);
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // The smaller index becomes the root.
  void unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return;
    if (y < x) std::swap(x, y);
    parent_[y] = x;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

Clustering clusters(const SimMatrix& matrix, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "tau must lie in [0, 1]");
  }
  const std::size_t n = matrix.n();
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (matrix(i, j) > tau) sets.unite(i, j);
    }
  }
  Clustering out;
  out.tau = tau;
  out.assignment.resize(n);
  std::map<std::size_t, std::size_t> root_to_id;
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = sets.find(i);
    auto [it, inserted] = root_to_id.emplace(root, out.sizes.size());
    if (inserted) out.sizes.push_back(0);
    out.assignment[i] = it->second;
    ++out.sizes[it->second];
  }
  return out;
}

double effective_clusters(const Clustering& clustering) {
  const double n = static_cast<double>(clustering.assignment.size());
  if (n == 0) throw Error(ErrorKind::kDomain, "effective cluster count needs n >= 1");
  double entropy = 0.0;
  for (std::size_t size : clustering.sizes) {
    if (size == 0) continue;
    const double p = static_cast<double>(size) / n;
    entropy -= p * std::log(p);
  }
  return std::exp(entropy);
}

double one_gram_similarity(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::vector<std::string_view> sa(a.begin(), a.end());
  std::vector<std::string_view> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::size_t common = 0;
  for (std::size_t i = 0, j = 0; i < sa.size() && j < sb.size();) {
    if (sa[i] == sb[j]) {
      ++common;
      ++i;
      ++j;
    } else if (sa[i] < sb[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return 2.0 * static_cast<double>(common) / static_cast<double>(sa.size() + sb.size());
}

double one_gram_similarity(std::string_view a, std::string_view b) {
  const auto ta = lexical_tokens(a);
  const auto tb = lexical_tokens(b);
  return one_gram_similarity(ta, tb);
}

SimMatrix one_gram_matrix(std::span<const std::string> sources) {
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(sources.size());
  for (const auto& s : sources) tokens.push_back(lexical_tokens(s));
  SimMatrix m(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t j = i + 1; j < sources.size(); ++j) {
      m.set(i, j, one_gram_similarity(tokens[i], tokens[j]));
    }
  }
  return m;
}

double one_gram_div(std::span<const std::string> sources) {
  if (sources.size() < 2) throw Error(ErrorKind::kDomain, "JDiv undefined for groups smaller than 2");
  return jdiv(one_gram_matrix(sources));
}

}  // namespace tilediv
