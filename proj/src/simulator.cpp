#include "tilediv/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "tilediv/error.hpp"
#include "tilediv/metrics.hpp"

namespace tilediv::sim {

using json = nlohmann::json;

void TemplateWorld::validate() const {
  if (correct.empty()) throw Error(ErrorKind::kConfig, "world: no templates");
  if (similarity.n() != correct.size()) {
    throw Error(ErrorKind::kConfig, "world: similarity size does not match template count");
  }
  if (initial_logits.size() != correct.size()) {
    throw Error(ErrorKind::kConfig, "world: logits size does not match template count");
  }
  const auto m = std::count(correct.begin(), correct.end(), true);
  if (m == 0 || m == static_cast<long>(correct.size())) {
    throw Error(ErrorKind::kConfig, "world: needs at least one correct and one incorrect template");
  }
}

TemplateWorld make_family_world(const FamilyWorldConfig& config) {
  if (config.correct_families.size() != config.families) {
    throw Error(ErrorKind::kConfig, "world: correct_families must list every family");
  }
  const std::size_t t = config.families * config.templates_per_family;
  TemplateWorld world;
  world.similarity = SimMatrix(t);
  world.initial_logits.assign(t, 0.0);
  if (t > 0) world.initial_logits[0] = config.dominant_logit;
  for (std::size_t i = 0; i < t; ++i) {
    const std::size_t fam = i / config.templates_per_family;
    world.correct.push_back(config.correct_families[fam]);
    for (std::size_t j = i + 1; j < t; ++j) {
      const bool same = fam == j / config.templates_per_family;
      world.similarity.set(i, j, same ? config.within : config.cross);
    }
  }
  world.validate();
  return world;
}

CategoricalPolicy::CategoricalPolicy(std::vector<double> logits, double temperature)
    : logits_(std::move(logits)), temperature_(temperature) {
  if (!(temperature_ > 0.0)) throw Error(ErrorKind::kConfig, "temperature must be positive");
}

std::vector<double> CategoricalPolicy::probabilities() const {
  std::vector<double> p(logits_.size());
  if (p.empty()) return p;
  const double top = *std::max_element(logits_.begin(), logits_.end());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp((logits_[i] - top) / temperature_);
    total += p[i];
  }
  for (auto& v : p) v /= total;
  return p;
}

double CategoricalPolicy::entropy() const {
  double h = 0.0;
  for (double v : probabilities()) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

namespace {

std::vector<double> cumulative(const std::vector<double>& probs) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  return cdf;
}

}  // namespace

std::size_t draw_template(const std::vector<double>& cdf, Engine& engine) {
  const double u = draw_unit(engine) * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

SampledGroup sample_group(const CategoricalPolicy& policy, const TemplateWorld& world,
                          std::size_t n, std::uint64_t seed) {
  const auto cdf = cumulative(policy.probabilities());
  Engine engine(seed);
  SampledGroup group;
  group.templates.reserve(n);
  std::vector<bool> correct;
  correct.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = draw_template(cdf, engine);
    group.templates.push_back(t);
    correct.push_back(world.correct[t]);
  }
  group.outcome = GroupOutcome(std::move(correct));
  group.matrix = SimMatrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      group.matrix.set(i, j, world.similarity(group.templates[i], group.templates[j]));
    }
  }
  return group;
}

std::string ObjectiveConfig::label() const {
  std::ostringstream out;
  out << (objective == Objective::kDiversity ? "diversity_only" : objective_name(objective));
  if (objective == Objective::kCombined) out << "_lambda" << lambda_div;
  if ((objective == Objective::kPkpo || objective == Objective::kPasskLoo) && k > 0) out << "_k" << k;
  if (objective == Objective::kEntropy) out << "_beta" << beta;
  return out.str();
}

AdvantageVector objective_advantages(const ObjectiveConfig& objective, const SampledGroup& group) {
  switch (objective.objective) {
    case Objective::kBase:
    case Objective::kEntropy:
      return base_advantages(group.outcome);
    case Objective::kPasskLoo:
      return passk_loo_advantages(group.outcome);
    case Objective::kPkpo:
      return pkpo_advantages(group.outcome, objective.k);
    case Objective::kDiversity:
      return diversity_advantages(group.matrix);
    case Objective::kCombined:
      return combined_advantages(group.outcome, group.matrix, objective.lambda_div);
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown objective");
}

void apply_policy_gradient(CategoricalPolicy& policy, const std::vector<std::size_t>& templates,
                           const std::vector<double>& advantages, double lr) {
  const auto p = policy.probabilities();
  const double inv_t = 1.0 / policy.temperature();
  auto& theta = policy.logits();
  std::vector<double> grad(theta.size(), 0.0);
  double total_adv = 0.0;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    grad[templates[i]] += advantages[i];
    total_adv += advantages[i];
  }
  for (std::size_t j = 0; j < theta.size(); ++j) {
    theta[j] += lr * inv_t * (grad[j] - total_adv * p[j]);
  }
}

std::vector<double> entropy_gradient(const CategoricalPolicy& policy) {
  const auto p = policy.probabilities();
  const double h = policy.entropy();
  std::vector<double> grad(p.size(), 0.0);
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] > 0.0) grad[j] = -p[j] * (std::log(p[j]) + h) / policy.temperature();
  }
  return grad;
}

CategoricalPolicy step(const CategoricalPolicy& policy, const TemplateWorld& world,
                       const ObjectiveConfig& objective, const StepParams& params,
                       std::uint64_t seed) {
  std::size_t n = params.group_size;
  if (objective.objective == Objective::kPasskLoo && objective.k > 0) n = objective.k;
  const auto group = sample_group(policy, world, n, seed);
  const auto adv = objective_advantages(objective, group);
  CategoricalPolicy next = policy;
  std::vector<double> bonus;
  if (objective.objective == Objective::kEntropy) bonus = entropy_gradient(policy);
  apply_policy_gradient(next, group.templates, adv.values, params.lr);
  for (std::size_t j = 0; j < bonus.size(); ++j) {
    next.logits()[j] += params.lr * objective.beta * bonus[j];
  }
  return next;
}

double analytic_pass1(const std::vector<double>& probs, const TemplateWorld& world) {
  double total = 0.0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    if (world.correct[t]) total += probs[t];
  }
  return total;
}

double expected_jdiv(const std::vector<double>& probs, const TemplateWorld& world) {
  double same = 0.0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    for (std::size_t u = 0; u < probs.size(); ++u) {
      same += probs[t] * probs[u] * world.similarity(t, u);
    }
  }
  return std::clamp(1.0 - same, 0.0, 1.0);
}

double monte_carlo_pass_at_k(const CategoricalPolicy& policy, const TemplateWorld& world,
                             std::size_t n, std::size_t k, std::size_t groups,
                             std::uint64_t seed) {
  if (groups == 0) throw Error(ErrorKind::kConfig, "eval_groups must be positive");
  const auto cdf = cumulative(policy.probabilities());
  Engine engine(seed);
  double total = 0.0;
  for (std::size_t g = 0; g < groups; ++g) {
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (world.correct[draw_template(cdf, engine)]) ++m;
    }
    total += pass_at_k(n, m, k).value;
  }
  return total / static_cast<double>(groups);
}

namespace {

TraceRecord record(std::size_t step_index, const CategoricalPolicy& policy,
                   const RunConfig& config) {
  const auto p = policy.probabilities();
  TraceRecord r;
  r.step = step_index;
  r.pass1 = analytic_pass1(p, config.world);
  r.pass_k = monte_carlo_pass_at_k(policy, config.world, config.eval_n, config.eval_k,
                                   config.eval_groups, mix_seed(config.seed, 2 * step_index + 1));
  r.expected_jdiv = expected_jdiv(p, config.world);
  r.entropy = policy.entropy();
  r.logits = policy.logits();
  return r;
}

}  // namespace

TrainingTrace run(const RunConfig& config) {
  config.world.validate();
  if (config.eval_k < 1 || config.eval_k > config.eval_n) {
    throw Error(ErrorKind::kConfig, "eval_k must lie in [1, eval_n]");
  }
  TrainingTrace trace;
  trace.label = config.objective.label();
  trace.seed = config.seed;
  trace.eval_k = config.eval_k;
  CategoricalPolicy policy(config.world.initial_logits, config.temperature);
  trace.records.reserve(config.steps + 1);
  trace.records.push_back(record(0, policy, config));
  for (std::size_t s = 0; s < config.steps; ++s) {
    policy = step(policy, config.world, config.objective, config.step, mix_seed(config.seed, 2 * s));
    trace.records.push_back(record(s + 1, policy, config));
  }
  return trace;
}

void write_trace(const TrainingTrace& trace, std::ostream& out) {
  for (const auto& r : trace.records) {
    json line;
    line["step"] = r.step;
    line["objective"] = trace.label;
    line["seed"] = trace.seed;
    line["pass1"] = r.pass1;
    line["pass_at_k"] = r.pass_k;
    line["k"] = trace.eval_k;
    line["expected_jdiv"] = r.expected_jdiv;
    line["entropy"] = r.entropy;
    line["logits"] = r.logits;
    out << line.dump() << '\n';
  }
}

std::vector<RunConfig> ExperimentConfig::runs() const {
  std::vector<RunConfig> out;
  for (const auto& objective : objectives) {
    for (auto seed : seeds) {
      RunConfig rc;
      rc.world = world;
      rc.objective = objective;
      rc.steps = steps;
      rc.step = step;
      rc.temperature = temperature;
      rc.seed = seed;
      rc.eval_k = eval_k;
      rc.eval_n = eval_n;
      rc.eval_groups = eval_groups;
      out.push_back(std::move(rc));
    }
  }
  return out;
}

namespace {

template <typename T>
T field(const json& obj, const char* name, const std::string& where, T fallback) {
  auto it = obj.find(name);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::kConfig, "field '" + where + name + "' has the wrong type");
  }
}

TemplateWorld parse_world(const json& w) {
  if (!w.is_object()) throw Error(ErrorKind::kConfig, "field 'world' must be an object");
  if (w.contains("correct")) {
    TemplateWorld world;
    world.correct = field<std::vector<bool>>(w, "correct", "world.", {});
    const auto rows = field<std::vector<std::vector<double>>>(w, "similarity", "world.", {});
    std::vector<double> flat;
    for (const auto& row : rows) {
      if (row.size() != rows.size()) throw Error(ErrorKind::kConfig, "field 'world.similarity' must be square");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    try {
      world.similarity = SimMatrix(rows.size(), std::move(flat));
    } catch (const Error& e) {
      throw Error(ErrorKind::kConfig, std::string("field 'world.similarity': ") + e.what());
    }
    world.initial_logits = field<std::vector<double>>(w, "logits", "world.",
                                                      std::vector<double>(world.correct.size(), 0.0));
    world.validate();
    return world;
  }
  FamilyWorldConfig fc;
  fc.families = field<std::size_t>(w, "families", "world.", fc.families);
  fc.templates_per_family = field<std::size_t>(w, "templates_per_family", "world.", fc.templates_per_family);
  fc.within = field<double>(w, "within", "world.", fc.within);
  fc.cross = field<double>(w, "cross", "world.", fc.cross);
  fc.correct_families = field<std::vector<bool>>(w, "correct_families", "world.", fc.correct_families);
  fc.dominant_logit = field<double>(w, "dominant_logit", "world.", fc.dominant_logit);
  if (!(fc.within >= 0.0 && fc.within <= 1.0) || !(fc.cross >= 0.0 && fc.cross <= 1.0)) {
    throw Error(ErrorKind::kConfig, "field 'world.within'/'world.cross' must lie in [0, 1]");
  }
  return make_family_world(fc);
}

ObjectiveConfig parse_objective_entry(const json& o, std::size_t index) {
  const std::string where = "objectives[" + std::to_string(index) + "].";
  if (!o.is_object() || !o.contains("name")) {
    throw Error(ErrorKind::kConfig, "field '" + where + "name' is required");
  }
  ObjectiveConfig cfg;
  try {
    cfg.objective = parse_objective(field<std::string>(o, "name", where, ""));
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, "field '" + where + "name': " + e.what());
  }
  cfg.lambda_div = field<double>(o, "lambda_div", where, 0.0);
  cfg.k = field<std::size_t>(o, "k", where, 0);
  cfg.beta = field<double>(o, "beta", where, 0.0);
  if (cfg.lambda_div < 0.0) throw Error(ErrorKind::kConfig, "field '" + where + "lambda_div' must be >= 0");
  if (cfg.objective == Objective::kPkpo && cfg.k == 0) {
    throw Error(ErrorKind::kConfig, "field '" + where + "k' is required for pkpo");
  }
  return cfg;
}

}  // namespace

ExperimentConfig parse_experiment(std::istream& in) {
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorKind::kConfig, "config must be an object");
  ExperimentConfig cfg;
  if (root.contains("world")) cfg.world = parse_world(root["world"]);
  if (!root.contains("objectives") || !root["objectives"].is_array() || root["objectives"].empty()) {
    throw Error(ErrorKind::kConfig, "field 'objectives' must be a non-empty array");
  }
  for (std::size_t i = 0; i < root["objectives"].size(); ++i) {
    cfg.objectives.push_back(parse_objective_entry(root["objectives"][i], i));
  }
  cfg.seeds = field<std::vector<std::uint64_t>>(root, "seeds", "", {0});
  if (cfg.seeds.empty()) throw Error(ErrorKind::kConfig, "field 'seeds' must not be empty");
  cfg.steps = field<std::size_t>(root, "steps", "", cfg.steps);
  cfg.step.lr = field<double>(root, "lr", "", cfg.step.lr);
  cfg.step.group_size = field<std::size_t>(root, "group_size", "", cfg.step.group_size);
  cfg.temperature = field<double>(root, "temperature", "", cfg.temperature);
  cfg.eval_k = field<std::size_t>(root, "eval_k", "", cfg.eval_k);
  cfg.eval_n = field<std::size_t>(root, "eval_n", "", cfg.eval_n);
  cfg.eval_groups = field<std::size_t>(root, "eval_groups", "", cfg.eval_groups);
  if (cfg.step.group_size < 3) throw Error(ErrorKind::kConfig, "field 'group_size' must be >= 3");
  if (!(cfg.temperature > 0.0)) throw Error(ErrorKind::kConfig, "field 'temperature' must be positive");
  if (cfg.eval_k < 1 || cfg.eval_k > cfg.eval_n) {
    throw Error(ErrorKind::kConfig, "field 'eval_k' must lie in [1, eval_n]");
  }
  if (cfg.eval_groups == 0) throw Error(ErrorKind::kConfig, "field 'eval_groups' must be positive");
  for (const auto& o : cfg.objectives) {
    if (o.objective == Objective::kPkpo && o.k > cfg.step.group_size) {
      throw Error(ErrorKind::kConfig, "field 'objectives[].k' exceeds group_size");
    }
  }
  return cfg;
}

}  // namespace tilediv::sim
