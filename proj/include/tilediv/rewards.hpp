#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tilediv/metrics.hpp"
#include "tilediv/similarity.hpp"

namespace tilediv {

enum class Objective { kBase, kPasskLoo, kPkpo, kDiversity, kCombined, kEntropy };

std::string_view objective_name(Objective objective);
Objective parse_objective(std::string_view name);

// Group-level diversity reward behind the diversity and combined objectives.
enum class DiversityReward { kJplag, kOneGram, kVendi };

std::string_view diversity_reward_name(DiversityReward reward);
DiversityReward parse_diversity_reward(std::string_view name);

// Verifier outcomes for one group. Signed rewards are the affine image
// r = 2c - 1 of the {0,1} correctness values.
class GroupOutcome {
 public:
  GroupOutcome() = default;
  explicit GroupOutcome(std::vector<bool> correct) : correct_(std::move(correct)) {}

  std::size_t n() const { return correct_.size(); }
  std::size_t m() const;
  bool correct(std::size_t i) const { return correct_[i]; }
  const std::vector<bool>& labels() const { return correct_; }
  std::vector<double> signed_rewards() const;
  std::vector<double> binary_rewards() const;

 private:
  std::vector<bool> correct_;
};

struct AdvantageParams {
  std::optional<std::size_t> k;
  std::optional<double> lambda_div;
  std::optional<DiversityReward> diversity;
};

struct AdvantageVector {
  Objective objective = Objective::kBase;
  std::vector<double> values;
  AdvantageParams params;
  bool centered = false;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double sum() const;
};

enum class RewardScale { kBinary, kSigned };

// Sum of {0,1} verifier outcomes.
double correctness_reward(const GroupOutcome& outcome);

// a_i = r_i - mean(r) on signed rewards; raw a_i = r_i when !centered.
AdvantageVector base_advantages(const GroupOutcome& outcome, bool centered = true);

// A_i = max_j r_j - max_{j != i} r_j. A single-sample group gets 0.
std::vector<double> passk_loo_raw(const GroupOutcome& outcome,
                                  RewardScale scale = RewardScale::kSigned);
// Signed-scale leave-one-out, mean-centered. The group is the k-sample set.
AdvantageVector passk_loo_advantages(const GroupOutcome& outcome);

// Leave-one-out averaged over the k-subsets containing each sample, on the
// {0,1} scale: C(n-m, k-1) / C(n-1, k-1) for correct samples, 0 otherwise.
AdvantageVector pkpo_advantages(const GroupOutcome& outcome, std::size_t k);

inline constexpr std::size_t kPkpoOracleMaxN = 20;
// Literal k-subset enumeration of the same quantity; n <= kPkpoOracleMaxN.
AdvantageVector pkpo_bruteforce_oracle(const GroupOutcome& outcome, std::size_t k);

// A_i = R(Y) - R(Y \ {i}) for a group-level reward evaluated on index sets.
using GroupReward = std::function<double(std::span<const std::size_t>)>;
std::vector<double> leave_one_out(std::size_t n, const GroupReward& reward);

// Leave-one-out on the 1 - mean-pairwise-similarity reward. Works for JPlag
// and 1-gram matrices alike; requires n >= 3.
AdvantageVector diversity_advantages(const SimMatrix& matrix);
// Leave-one-out on the Vendi score of the group's embeddings; n >= 2.
AdvantageVector vendi_diversity_advantages(const EmbeddingSet& embeddings);

// base (centered) + lambda_div * diversity, per sample.
AdvantageVector combined_advantages(const GroupOutcome& outcome, const SimMatrix& matrix,
                                    double lambda_div);
AdvantageVector combine_advantages(const AdvantageVector& base, const AdvantageVector& diversity,
                                   double lambda_div);

}  // namespace tilediv
