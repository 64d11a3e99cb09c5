#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tilediv/error.hpp"
#include "tilediv/ingest.hpp"
#include "tilediv/pytokenizer.hpp"
#include "tilediv/similarity.hpp"

using namespace tilediv;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(TILEDIV_TEST_DATA) + "/" + name);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

using Kinds = std::vector<std::uint8_t>;

Kinds random_kinds(std::mt19937_64& rng, std::size_t len, unsigned alphabet) {
  Kinds out(len);
  for (auto& k : out) k = static_cast<std::uint8_t>(rng() % alphabet);
  return out;
}

SimMatrix matrix_of(std::size_t n, std::initializer_list<double> upper) {
  SimMatrix m(n);
  auto it = upper.begin();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, *it++);
  return m;
}

}  // namespace

TEST_CASE("gst_match basics") {
  const Kinds a{1, 2, 3, 4, 5, 6, 7};
  auto self = gst_match(a, a, 5);
  REQUIRE(self.tiles.size() == 1);
  CHECK(self.matched_tokens == 7);
  CHECK(avg_similarity(self, 7, 7) == 1.0);

  const Kinds b{8, 9, 10, 11, 12, 13};
  CHECK(gst_match(a, b, 5).tiles.empty());
  CHECK(avg_similarity(gst_match(a, b, 5), 7, 6) == 0.0);

  // XXXXXYYYYY vs YYYYYXXXXX
  const Kinds x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const Kinds y{6, 7, 8, 9, 10, 1, 2, 3, 4, 5};
  const auto m = gst_match(x, y, 5);
  CHECK(m.tiles.size() == 2);
  CHECK(m.matched_tokens == 10);
  CHECK(avg_similarity(m, 10, 10) == 1.0);
  const auto o = oracle::gst(x, y, 5);
  CHECK(oracle::matched(o) == 10);
  // Equal-length tie: smaller start_a first.
  CHECK(m.tiles[0].start_a == 0);
  CHECK(m.tiles[0].start_b == 5);
}

TEST_CASE("avg_similarity edge cases") {
  CHECK(avg_similarity(0, 0, 0) == 1.0);
  CHECK(avg_similarity(0, 3, 0) == 0.0);
  CHECK(avg_similarity(4, 4, 6) == doctest::Approx(0.8));
}

TEST_CASE("gst_match agrees with the one-tile-at-a-time oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 400; ++trial) {
    const unsigned alphabet = 2 + rng() % 6;
    const std::size_t mm = 1 + rng() % 6;
    auto a = random_kinds(rng, rng() % 60, alphabet);
    auto b = random_kinds(rng, rng() % 60, alphabet);
    if (trial % 3 == 0 && !a.empty()) {
      // Plant shuffled copies of chunks of a in b.
      b = a;
      std::rotate(b.begin(), b.begin() + static_cast<long>(rng() % b.size()), b.end());
      b[rng() % b.size()] = static_cast<std::uint8_t>(alphabet);
    }
    const auto got = gst_match_exact(a, b, mm);
    const auto want = oracle::gst(a, b, mm);
    REQUIRE(got.tiles.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      CHECK(got.tiles[i].start_a == want[i].a);
      CHECK(got.tiles[i].start_b == want[i].b);
      CHECK(got.tiles[i].length == want[i].len);
    }
    CHECK(got.matched_tokens == oracle::matched(want));
    CHECK(gst_match_hashed(a, b, mm) == got);
  }
}

TEST_CASE("match set invariants and score symmetry") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    auto a = random_kinds(rng, 1 + rng() % 80, 4);
    auto b = random_kinds(rng, 1 + rng() % 80, 4);
    const auto m = gst_match(a, b, 5);
    std::vector<bool> ua(a.size()), ub(b.size());
    for (const auto& t : m.tiles) {
      CHECK(t.length >= 5);
      for (std::size_t k = 0; k < t.length; ++k) {
        CHECK_FALSE(ua[t.start_a + k]);
        CHECK_FALSE(ub[t.start_b + k]);
        ua[t.start_a + k] = ub[t.start_b + k] = true;
        CHECK(a[t.start_a + k] == b[t.start_b + k]);
      }
    }
    CHECK(m.matched_tokens <= std::min(a.size(), b.size()));
    const auto r = gst_match(b, a, 5);
    CHECK(avg_similarity(m, a.size(), b.size()) == avg_similarity(r, b.size(), a.size()));
    std::size_t prev = m.matched_tokens;
    for (std::size_t mm = 4; mm >= 1; --mm) {
      const auto lower = gst_match(a, b, mm).matched_tokens;
      CHECK(lower >= prev);
      prev = lower;
    }
  }
}

TEST_CASE("Table 1 pairs") {
  const auto a1 = tokenize(read_fixture("table1_pair1_a.py"));
  const auto b1 = tokenize(read_fixture("table1_pair1_b.py"));
  const auto a2 = tokenize(read_fixture("table1_pair2_a.py"));
  const auto b2 = tokenize(read_fixture("table1_pair2_b.py"));
  const double s1 = stream_similarity(a1, b1);
  const double s2 = stream_similarity(a2, b2);
  CHECK(s1 == 1.0);
  CHECK(s2 < s1);
  const std::vector<TokenStream> group{a1, b1};
  const auto m = pairwise_matrix(group);
  CHECK(m(0, 1) == 1.0);
}

TEST_CASE("pairwise_matrix") {
  const std::vector<TokenStream> one{tokenize("x = 1")};
  const auto m1 = pairwise_matrix(one);
  CHECK(m1.n() == 1);
  CHECK(m1(0, 0) == 1.0);

  std::vector<TokenStream> group;
  for (const char* src : {"def f(a):\n    return a + 1\n", "def g(b):\n    return b + 2\n",
                          "for i in x:\n    print(i)\n", "", "", "while y:\n    y -= 1\n"}) {
    group.push_back(tokenize(src));
  }
  const auto seq = pairwise_matrix(group, 5, 1);
  const auto par = pairwise_matrix(group, 5, 4);
  CHECK(seq == par);
  CHECK(seq(0, 1) == 1.0);
  CHECK(seq(3, 4) == 1.0);  // both empty
  CHECK(seq(0, 3) == 0.0);
}

TEST_CASE("SimMatrix validation and IO") {
  CHECK_THROWS_AS(SimMatrix(2, {1.0, 0.5, 0.4, 1.0}), Error);
  CHECK_THROWS_AS(SimMatrix(2, {1.0, 1.5, 1.5, 1.0}), Error);
  CHECK_THROWS_AS(SimMatrix(2, {0.9, 0.5, 0.5, 1.0}), Error);
  const auto m = matrix_of(3, {0.1, 1.0 / 3.0, 0.7});
  std::stringstream text;
  write_matrix_text(m, text);
  CHECK(read_matrix_text(text) == m);
  std::stringstream bin;
  write_matrix_binary(m, bin);
  CHECK(bin.str().size() == 8 + 9 * 8);
  CHECK(read_matrix_binary(bin) == m);
  std::stringstream golden;
  write_matrix_text(matrix_of(2, {0.5}), golden);
  CHECK(golden.str() == "2\n1 0.5\n0.5 1\n");
  CHECK(m.without(1) == matrix_of(2, {1.0 / 3.0}));
}

TEST_CASE("jdiv") {
  CHECK(jdiv(matrix_of(3, {1, 1, 1})) == 0.0);
  CHECK(jdiv(matrix_of(3, {0, 0, 0})) == 1.0);
  CHECK(jdiv(matrix_of(3, {0.5, 0.5, 1.0})) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_WITH(jdiv(SimMatrix(1)), "JDiv undefined for groups smaller than 2");
}

TEST_CASE("clusters and effective count") {
  auto dup = clusters(matrix_of(4, {1, 1, 1, 1, 1, 1}), 0.7);
  CHECK(dup.count() == 1);
  CHECK(effective_clusters(dup) == doctest::Approx(1.0));

  auto sep = clusters(matrix_of(4, {0, 0, 0, 0, 0, 0}), 0.7);
  CHECK(sep.count() == 4);
  CHECK(effective_clusters(sep) == doctest::Approx(4.0));

  auto chain = clusters(matrix_of(3, {0.8, 0.1, 0.8}), 0.7);
  CHECK(chain.count() == 1);

  // Strict threshold: an edge at exactly tau does not join.
  CHECK(clusters(matrix_of(2, {0.7}), 0.7).count() == 2);

  // sizes {2, 1, 1}
  auto c = clusters(matrix_of(4, {0, 0.9, 0, 0, 0, 0}), 0.7);
  CHECK(c.sizes == std::vector<std::size_t>{2, 1, 1});
  CHECK(c.assignment == std::vector<std::size_t>{0, 1, 0, 2});
  const double want = std::exp(-(0.5 * std::log(0.5) + 0.5 * std::log(0.25)));
  CHECK(effective_clusters(c) == doctest::Approx(want).epsilon(1e-12));
  CHECK(effective_clusters(c) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("cluster properties on random matrices") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    SimMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, u(rng));
    const auto c = clusters(m, 0.7);
    std::size_t total = 0;
    for (auto s : c.sizes) total += s;
    CHECK(total == n);
    const double eff = effective_clusters(c);
    CHECK(eff >= 1.0 - 1e-12);
    CHECK(eff <= static_cast<double>(c.count()) + 1e-9);
    // Edges never cross clusters; components are connected by construction.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (m(i, j) > 0.7) CHECK(c.assignment[i] == c.assignment[j]);

    // Reordering keeps the effective count.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    SimMatrix p(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) p.set(i, j, m(perm[i], perm[j]));
    CHECK(effective_clusters(clusters(p, 0.7)) == doctest::Approx(eff).epsilon(1e-12));
  }
}

TEST_CASE("appending a duplicate moves jdiv by the duplicated row mean") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 8;
    SimMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, u(rng));
    const std::size_t d = rng() % n;
    SimMatrix big(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) big.set(i, j, m(i, j));
      big.set(i, n, i == d ? 1.0 : m(i, d));
    }
    const double before = jdiv(m);
    const double after = jdiv(big);
    CHECK(after >= 0.0);
    CHECK(after <= 1.0);
    // The copy adds pairs whose mean is the duplicated row mean (self
    // included), so jdiv drops exactly when that row mean beats the old
    // mean similarity.
    double row = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (i != d) row += m(i, d);
    row /= static_cast<double>(n);
    const double mean = 1.0 - before;
    if (row > mean + 1e-12) CHECK(after < before);
    if (row < mean - 1e-12) CHECK(after > before);
  }
}

TEST_CASE("one-gram similarity") {
  CHECK(one_gram_similarity("x = f(y)", "x = f(y)") == 1.0);
  CHECK(one_gram_similarity("aa bb", "cc dd") == 0.0);
  CHECK(one_gram_similarity("", "") == 1.0);
  CHECK(one_gram_similarity("a", "") == 0.0);
  const std::vector<std::string> a{"a", "a", "b"}, b{"a", "b", "b"};
  CHECK(one_gram_similarity(a, b) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(one_gram_similarity("a a b", "a b b") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const std::vector<std::string> dup{"x = 1", "x = 1", "x = 1"};
  CHECK(one_gram_div(dup) == 0.0);
  const std::vector<std::string> disjoint{"a", "b", "c"};
  CHECK(one_gram_div(disjoint) == 1.0);
  const std::vector<std::string> pair{"a a b", "a b b"};
  CHECK(one_gram_div(pair) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  const std::vector<std::string> single{"a"};
  CHECK_THROWS_WITH(one_gram_div(single), "JDiv undefined for groups smaller than 2");
  CHECK(lexical_tokens("x1=f(a,b)") == std::vector<std::string>{"x1", "=", "f", "(", "a", ",", "b", ")"});
}
