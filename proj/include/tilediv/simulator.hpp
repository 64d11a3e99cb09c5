#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tilediv/rewards.hpp"
#include "tilediv/rng.hpp"
#include "tilediv/similarity.hpp"

namespace tilediv::sim {

// A synthetic prompt: T implementation templates with fixed correctness and
// pairwise similarity, plus the logits the policy starts from.
struct TemplateWorld {
  std::vector<bool> correct;
  SimMatrix similarity;
  std::vector<double> initial_logits;

  std::size_t size() const { return correct.size(); }
  // Throws config_error unless sizes agree and both outcomes are present.
  void validate() const;
};

struct FamilyWorldConfig {
  std::size_t families = 4;
  std::size_t templates_per_family = 3;
  double within = 0.9;
  double cross = 0.1;
  std::vector<bool> correct_families{true, true, false, false};
  // Logit of template 0; all other templates start at 0.
  double dominant_logit = 2.0;
};

TemplateWorld make_family_world(const FamilyWorldConfig& config = {});

class CategoricalPolicy {
 public:
  CategoricalPolicy() = default;
  explicit CategoricalPolicy(std::vector<double> logits, double temperature = 1.0);

  const std::vector<double>& logits() const { return logits_; }
  std::vector<double>& logits() { return logits_; }
  double temperature() const { return temperature_; }
  // softmax(logits / temperature)
  std::vector<double> probabilities() const;
  double entropy() const;

 private:
  std::vector<double> logits_;
  double temperature_ = 1.0;
};

struct SampledGroup {
  std::vector<std::size_t> templates;
  GroupOutcome outcome;
  SimMatrix matrix;
};

// Draws from a precomputed CDF; ties resolve to the lowest index.
std::size_t draw_template(const std::vector<double>& cdf, Engine& engine);

SampledGroup sample_group(const CategoricalPolicy& policy, const TemplateWorld& world,
                          std::size_t n, std::uint64_t seed);

struct ObjectiveConfig {
  Objective objective = Objective::kBase;
  double lambda_div = 0.0;  // combined
  std::size_t k = 0;        // passk_loo group size, pkpo subset size
  double beta = 0.0;        // entropy bonus weight

  std::string label() const;
};

// Lambda_div for the combined objective on the default world; checked by the
// directional acceptance run.
inline constexpr double kDefaultLambdaDiv = 4.0;

struct StepParams {
  std::size_t group_size = 16;
  double lr = 0.5;
};

// Per-sample advantages for a sampled group under the objective. The
// entropy objective uses base advantages here; its bonus enters the update.
AdvantageVector objective_advantages(const ObjectiveConfig& objective, const SampledGroup& group);

// theta += lr * sum_i A_i * grad log pi(t_i), with
// grad log pi(t) = (onehot(t) - softmax(theta / T)) / T.
void apply_policy_gradient(CategoricalPolicy& policy, const std::vector<std::size_t>& templates,
                           const std::vector<double>& advantages, double lr);
// Analytic gradient of the policy entropy with respect to the logits.
std::vector<double> entropy_gradient(const CategoricalPolicy& policy);

CategoricalPolicy step(const CategoricalPolicy& policy, const TemplateWorld& world,
                       const ObjectiveConfig& objective, const StepParams& params,
                       std::uint64_t seed);

struct RunConfig {
  TemplateWorld world = make_family_world();
  ObjectiveConfig objective;
  std::size_t steps = 500;
  StepParams step;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  std::size_t eval_k = 10;
  std::size_t eval_n = 20;
  std::size_t eval_groups = 1000;
};

struct TraceRecord {
  std::size_t step = 0;
  double pass1 = 0.0;          // sum of correct-template probabilities
  double pass_k = 0.0;         // Monte-Carlo mean of the unbiased estimator
  double expected_jdiv = 0.0;  // 1 - p^T S p
  double entropy = 0.0;
  std::vector<double> logits;
};

struct TrainingTrace {
  std::string label;
  std::uint64_t seed = 0;
  std::size_t eval_k = 0;
  std::vector<TraceRecord> records;  // steps + 1 entries
};

double analytic_pass1(const std::vector<double>& probs, const TemplateWorld& world);
double expected_jdiv(const std::vector<double>& probs, const TemplateWorld& world);
double monte_carlo_pass_at_k(const CategoricalPolicy& policy, const TemplateWorld& world,
                             std::size_t n, std::size_t k, std::size_t groups, std::uint64_t seed);

TrainingTrace run(const RunConfig& config);

void write_trace(const TrainingTrace& trace, std::ostream& out);

// Declarative experiment: one world, several objectives and seeds.
struct ExperimentConfig {
  TemplateWorld world = make_family_world();
  std::vector<ObjectiveConfig> objectives;
  std::vector<std::uint64_t> seeds;
  std::size_t steps = 500;
  StepParams step;
  double temperature = 1.0;
  std::size_t eval_k = 10;
  std::size_t eval_n = 20;
  std::size_t eval_groups = 1000;

  std::vector<RunConfig> runs() const;
};

ExperimentConfig parse_experiment(std::istream& in);

}  // namespace tilediv::sim
