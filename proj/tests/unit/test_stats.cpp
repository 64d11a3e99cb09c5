#include <doctest.h>

#include <cmath>
#include <random>

#include "tilediv/error.hpp"
#include "tilediv/stats.hpp"

using namespace tilediv;

TEST_CASE("paired_bootstrap examples") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0, 1);
  PairedSeries same;
  for (int i = 0; i < 50; ++i) {
    same.a.push_back(g(rng));
    same.b.push_back(same.a.back());
  }
  CHECK(paired_bootstrap(same, 1000, 3) == 1.0);

  PairedSeries apart = same;
  for (auto& v : apart.b) v += 10;
  CHECK(paired_bootstrap(apart, 1000, 3) == 0.0);

  CHECK_THROWS_AS(paired_bootstrap(PairedSeries{{1}, {2}}, 1000, 0), Error);
  CHECK_THROWS_AS(paired_bootstrap(same, 999, 0), Error);
  CHECK_THROWS_AS(paired_bootstrap(PairedSeries{{1, 2}, {2}}, 1000, 0), Error);
}

TEST_CASE("paired_bootstrap determinism and invariances") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0, 1);
  PairedSeries s;
  for (int i = 0; i < 80; ++i) {
    s.a.push_back(g(rng));
    s.b.push_back(s.a.back() + 0.1 + g(rng));
  }
  const double p = paired_bootstrap(s, 2000, 42);
  CHECK(p > 0.0);
  CHECK(p < 1.0);
  CHECK(paired_bootstrap(s, 2000, 42, 1) == paired_bootstrap(s, 2000, 42, 8));
  CHECK(paired_bootstrap(s, 2000, 42) == p);
  PairedSeries shifted = s;
  for (auto& v : shifted.a) v += 3.0;
  for (auto& v : shifted.b) v += 3.0;
  CHECK(paired_bootstrap(shifted, 2000, 42) == p);
}

TEST_CASE("aggregate_changes") {
  auto r = aggregate_changes(PairedSeries{{1, 2, 3}, {1, 2, 3}});
  CHECK(r.up_pct == 0);
  CHECK(r.down_pct == 0);
  CHECK(r.mean_delta == 0);
  CHECK(r.tie_pct == 100);

  r = aggregate_changes(PairedSeries{{1, 2, 3}, {2, 3, 4}});
  CHECK(r.up_pct == 100);
  CHECK(r.mean_delta == 1);

  r = aggregate_changes(PairedSeries{{0, 0, 0, 0}, {1, -1, 0, 2}});
  CHECK(r.comparisons == 4);
  CHECK(r.up_pct == 50);
  CHECK(r.down_pct == 25);
  CHECK(r.tie_pct == 25);
  CHECK(r.mean_delta == 0.5);
  CHECK(r.up_pct + r.down_pct + r.tie_pct == 100);
}

TEST_CASE("pearson") {
  const std::vector<double> x{1, 2, 3}, y{2, 2, 5}, neg{-1, -2, -3};
  CHECK(pearson(x, x) == doctest::Approx(1.0));
  CHECK(pearson(x, neg) == doctest::Approx(-1.0));
  CHECK(pearson(x, y) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
  CHECK(pearson(x, y) == doctest::Approx(0.8660).epsilon(1e-4));
  std::vector<double> ya;
  for (double v : y) ya.push_back(3 * v + 7);
  CHECK(pearson(x, ya) == doctest::Approx(pearson(x, y)).epsilon(1e-12));
  const std::vector<double> flat{1, 1, 1};
  CHECK_THROWS_AS(pearson(x, flat), Error);
  const std::vector<double> one{1};
  CHECK_THROWS_AS(pearson(one, one), Error);
}

TEST_CASE("seed_summary") {
  const std::vector<double> same{10, 10, 10}, two{8, 12}, one{5};
  auto s = seed_summary(same);
  CHECK(s.mean == 10);
  CHECK(*s.std == 0);
  s = seed_summary(two);
  CHECK(s.mean == 10);
  CHECK(*s.std == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
  s = seed_summary(one);
  CHECK(s.mean == 5);
  CHECK_FALSE(s.std.has_value());
}
