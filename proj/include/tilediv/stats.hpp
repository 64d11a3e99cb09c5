#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tilediv {

inline constexpr std::size_t kDefaultResamples = 10000;
inline constexpr std::size_t kMinResamples = 1000;

// Prompt-aligned metric values for two systems. Index i refers to the same
// prompt in both vectors.
struct PairedSeries {
  std::vector<double> a;
  std::vector<double> b;

  std::size_t size() const { return a.size(); }
};

// One-sided paired bootstrap testing B > A: prompts are resampled with
// replacement, and p is the fraction of resampled mean(B - A) that are <= 0.
// Resample r draws from its own seed stream, so any worker count gives the
// same p.
double paired_bootstrap(const PairedSeries& series, std::size_t resamples, std::uint64_t seed,
                        std::size_t workers = 1);

struct ChangeReport {
  std::size_t comparisons = 0;
  double up_pct = 0.0;    // strict improvements
  double down_pct = 0.0;  // strict decreases
  double tie_pct = 0.0;
  double mean_delta = 0.0;
};

ChangeReport aggregate_changes(const PairedSeries& series);

double pearson(std::span<const double> x, std::span<const double> y);

struct SeedSummary {
  double mean = 0.0;
  std::optional<double> std;  // sample std, n - 1 denominator
};

SeedSummary seed_summary(std::span<const double> values);

}  // namespace tilediv
