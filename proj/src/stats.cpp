#include "tilediv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tilediv/error.hpp"
#include "tilediv/parallel.hpp"
#include "tilediv/rng.hpp"

namespace tilediv {

namespace {

void check_aligned(const PairedSeries& series) {
  if (series.a.size() != series.b.size()) {
    throw Error(ErrorKind::kMismatch, "paired series differ in length");
  }
}

}  // namespace

double paired_bootstrap(const PairedSeries& series, std::size_t resamples, std::uint64_t seed,
                        std::size_t workers) {
  check_aligned(series);
  const std::size_t n = series.size();
  if (n < 2) throw Error(ErrorKind::kDomain, "paired bootstrap needs at least 2 prompts");
  if (resamples < kMinResamples) {
    throw Error(ErrorKind::kInvalidArgument,
                "paired bootstrap needs at least " + std::to_string(kMinResamples) + " resamples");
  }
  std::vector<double> delta(n);
  for (std::size_t i = 0; i < n; ++i) delta[i] = series.b[i] - series.a[i];

  std::vector<unsigned char> not_better(resamples, 0);
  parallel_for(resamples, workers, [&](std::size_t r) {
    Engine engine(mix_seed(seed, r));
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += delta[draw_index(engine, n)];
    not_better[r] = total <= 0.0 ? 1 : 0;
  });
  const auto count = std::accumulate(not_better.begin(), not_better.end(), std::size_t{0});
  return static_cast<double>(count) / static_cast<double>(resamples);
}

ChangeReport aggregate_changes(const PairedSeries& series) {
  check_aligned(series);
  ChangeReport report;
  report.comparisons = series.size();
  if (series.size() == 0) return report;
  std::size_t up = 0;
  std::size_t down = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double d = series.b[i] - series.a[i];
    if (d > 0) ++up;
    if (d < 0) ++down;
    total += d;
  }
  const double n = static_cast<double>(series.size());
  const std::size_t ties = series.size() - up - down;
  report.up_pct = 100.0 * static_cast<double>(up) / n;
  report.down_pct = 100.0 * static_cast<double>(down) / n;
  report.tie_pct = 100.0 * static_cast<double>(ties) / n;
  report.mean_delta = total / n;
  return report;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::kMismatch, "pearson: series differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorKind::kDomain, "pearson needs at least 2 points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::kDomain, "pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

SeedSummary seed_summary(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::kDomain, "seed summary needs at least one value");
  SeedSummary s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

}  // namespace tilediv
