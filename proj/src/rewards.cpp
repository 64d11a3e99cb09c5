#include "tilediv/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tilediv/error.hpp"

namespace tilediv {

std::string_view objective_name(Objective objective) {
  switch (objective) {
    case Objective::kBase: return "base";
    case Objective::kPasskLoo: return "passk_loo";
    case Objective::kPkpo: return "pkpo";
    case Objective::kDiversity: return "diversity";
    case Objective::kCombined: return "combined";
    case Objective::kEntropy: return "entropy";
  }
  return "unknown";
}

Objective parse_objective(std::string_view name) {
  for (auto o : {Objective::kBase, Objective::kPasskLoo, Objective::kPkpo, Objective::kDiversity,
                 Objective::kCombined, Objective::kEntropy}) {
    if (objective_name(o) == name) return o;
  }
  if (name == "diversity_only") return Objective::kDiversity;
  throw Error(ErrorKind::kInvalidArgument, "unknown objective '" + std::string(name) + "'");
}

std::string_view diversity_reward_name(DiversityReward reward) {
  switch (reward) {
    case DiversityReward::kJplag: return "jplag";
    case DiversityReward::kOneGram: return "one_gram";
    case DiversityReward::kVendi: return "vendi";
  }
  return "unknown";
}

DiversityReward parse_diversity_reward(std::string_view name) {
  for (auto r : {DiversityReward::kJplag, DiversityReward::kOneGram, DiversityReward::kVendi}) {
    if (diversity_reward_name(r) == name) return r;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown diversity reward '" + std::string(name) + "'");
}

std::size_t GroupOutcome::m() const {
  return static_cast<std::size_t>(std::count(correct_.begin(), correct_.end(), true));
}

std::vector<double> GroupOutcome::signed_rewards() const {
  std::vector<double> r;
  r.reserve(correct_.size());
  for (bool c : correct_) r.push_back(c ? 1.0 : -1.0);
  return r;
}

std::vector<double> GroupOutcome::binary_rewards() const {
  std::vector<double> r;
  r.reserve(correct_.size());
  for (bool c : correct_) r.push_back(c ? 1.0 : 0.0);
  return r;
}

double AdvantageVector::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

namespace {

void center(std::vector<double>& values) {
  if (values.empty()) return;
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  for (auto& v : values) v -= mean;
}

// Exact binomial while it fits in 64 bits.
std::optional<std::uint64_t> exact_binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(c);
}

}  // namespace

double correctness_reward(const GroupOutcome& outcome) {
  return static_cast<double>(outcome.m());
}

AdvantageVector base_advantages(const GroupOutcome& outcome, bool centered) {
  if (outcome.n() == 0) throw Error(ErrorKind::kDomain, "base advantages need n >= 1");
  AdvantageVector out;
  out.objective = Objective::kBase;
  out.values = outcome.signed_rewards();
  out.centered = centered;
  if (centered) center(out.values);
  return out;
}

std::vector<double> passk_loo_raw(const GroupOutcome& outcome, RewardScale scale) {
  const std::size_t n = outcome.n();
  std::vector<double> raw(n, 0.0);
  if (n < 2) return raw;
  const auto r = scale == RewardScale::kSigned ? outcome.signed_rewards() : outcome.binary_rewards();
  // Top two values suffice for every leave-one-out maximum.
  std::size_t top = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (r[i] > r[top]) top = i;
  }
  double second = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (i != top) second = std::max(second, r[i]);
  }
  for (std::size_t i = 0; i < n; ++i) raw[i] = r[top] - (i == top ? second : r[top]);
  return raw;
}

AdvantageVector passk_loo_advantages(const GroupOutcome& outcome) {
  AdvantageVector out;
  out.objective = Objective::kPasskLoo;
  out.params.k = outcome.n();
  out.values = passk_loo_raw(outcome, RewardScale::kSigned);
  out.centered = true;
  center(out.values);
  return out;
}

AdvantageVector pkpo_advantages(const GroupOutcome& outcome, std::size_t k) {
  const std::size_t n = outcome.n();
  if (k < 1 || k > n) {
    throw Error(ErrorKind::kInvalidArgument,
                "PKPO needs 1 <= k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  }
  const std::size_t m = outcome.m();
  double pivotal = 0.0;
  const auto num = exact_binomial(n - m, k - 1);
  const auto den = exact_binomial(n - 1, k - 1);
  if (num && den) {
    pivotal = static_cast<double>(*num) / static_cast<double>(*den);
  } else {
    pivotal = 1.0;
    for (std::size_t j = 0; j + 1 < k; ++j) {
      if (n - m < j + 1) {
        pivotal = 0.0;
        break;
      }
      pivotal *= static_cast<double>(n - m - j) / static_cast<double>(n - 1 - j);
    }
  }
  AdvantageVector out;
  out.objective = Objective::kPkpo;
  out.params.k = k;
  out.values.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (outcome.correct(i)) out.values[i] = pivotal;
  }
  return out;
}

AdvantageVector pkpo_bruteforce_oracle(const GroupOutcome& outcome, std::size_t k) {
  const std::size_t n = outcome.n();
  if (n > kPkpoOracleMaxN) {
    throw Error(ErrorKind::kInvalidArgument, "PKPO enumeration is limited to n <= " +
                                                 std::to_string(kPkpoOracleMaxN));
  }
  if (k < 1 || k > n) throw Error(ErrorKind::kInvalidArgument, "PKPO needs 1 <= k <= n");
  const auto r = outcome.binary_rewards();
  std::vector<std::uint64_t> total(n, 0);
  std::vector<std::uint64_t> memberships(n, 0);
  // Walk every k-subset as an increasing index tuple.
  std::vector<std::size_t> subset(k);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  while (true) {
    for (std::size_t i : subset) {
      double with_i = 0.0;
      double without_i = 0.0;  // max over an empty set is 0
      for (std::size_t j : subset) {
        with_i = std::max(with_i, r[j]);
        if (j != i) without_i = std::max(without_i, r[j]);
      }
      total[i] += static_cast<std::uint64_t>(with_i - without_i);
      ++memberships[i];
    }
    std::size_t pos = k;
    while (pos > 0 && subset[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (std::size_t j = pos; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
  AdvantageVector out;
  out.objective = Objective::kPkpo;
  out.params.k = k;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = static_cast<double>(total[i]) / static_cast<double>(memberships[i]);
  }
  return out;
}

std::vector<double> leave_one_out(std::size_t n, const GroupReward& reward) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const double full = reward(all);
  std::vector<double> adv(n);
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i) {
    rest.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) rest.push_back(j);
    }
    adv[i] = full - reward(rest);
  }
  return adv;
}

AdvantageVector diversity_advantages(const SimMatrix& matrix) {
  if (matrix.n() < 3) {
    throw Error(ErrorKind::kDomain, "diversity LOO undefined for groups smaller than 3");
  }
  AdvantageVector out;
  out.objective = Objective::kDiversity;
  out.params.diversity = DiversityReward::kJplag;
  out.values = leave_one_out(matrix.n(), [&](std::span<const std::size_t> idx) {
    return jdiv(matrix.submatrix(idx));
  });
  return out;
}

AdvantageVector vendi_diversity_advantages(const EmbeddingSet& embeddings) {
  if (embeddings.size() < 2) {
    throw Error(ErrorKind::kDomain, "Vendi LOO undefined for groups smaller than 2");
  }
  AdvantageVector out;
  out.objective = Objective::kDiversity;
  out.params.diversity = DiversityReward::kVendi;
  out.values = leave_one_out(embeddings.size(), [&](std::span<const std::size_t> idx) {
    return vendi_score(embeddings.subset(idx));
  });
  return out;
}

AdvantageVector combine_advantages(const AdvantageVector& base, const AdvantageVector& diversity,
                                   double lambda_div) {
  if (!(lambda_div >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "lambda_div must be >= 0");
  if (base.size() != diversity.size()) {
    throw Error(ErrorKind::kInvalidArgument, "advantage components differ in length");
  }
  AdvantageVector out;
  out.objective = Objective::kCombined;
  out.params.lambda_div = lambda_div;
  out.params.diversity = diversity.params.diversity;
  out.values.resize(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    out.values[i] = base[i] + lambda_div * diversity[i];
  }
  return out;
}

AdvantageVector combined_advantages(const GroupOutcome& outcome, const SimMatrix& matrix,
                                    double lambda_div) {
  if (outcome.n() != matrix.n()) {
    throw Error(ErrorKind::kInvalidArgument, "outcome and similarity matrix differ in size");
  }
  return combine_advantages(base_advantages(outcome), diversity_advantages(matrix), lambda_div);
}

}  // namespace tilediv
