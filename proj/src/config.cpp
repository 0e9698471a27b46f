#include "scucb/config.hpp"

#include "scucb/rng.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace scucb {

using nlohmann::json;

std::string to_string(MeansRule rule) {
  return rule == MeansRule::uniform ? "uniform" : "list";
}

std::string to_string(BudgetRule rule) {
  switch (rule) {
    case BudgetRule::uniform_random: return "uniform_random";
    case BudgetRule::fixed: return "fixed";
    case BudgetRule::list: return "list";
  }
  return "unknown";
}

namespace {

MeansRule means_rule_from_string(const std::string& s) {
  if (s == "uniform") return MeansRule::uniform;
  if (s == "list") return MeansRule::list;
  throw ValidationError("unknown means_rule: " + s);
}

BudgetRule budget_rule_from_string(const std::string& s) {
  if (s == "uniform_random") return BudgetRule::uniform_random;
  if (s == "fixed") return BudgetRule::fixed;
  if (s == "list") return BudgetRule::list;
  throw ValidationError("unknown budget_rule: " + s);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (num_arms < 1) throw ValidationError("num_arms must be >= 1");
  if (action_size < 1 || action_size > num_arms)
    throw ValidationError("action_size must lie in [1, num_arms]");
  if (horizon <= num_arms) throw ValidationError("horizon must exceed num_arms");
  if (means_rule == MeansRule::list) {
    if (means.size() != num_arms) throw ValidationError("means list must have num_arms entries");
    for (double mu : means)
      if (!(mu >= 0.0 && mu <= 1.0)) throw ValidationError("means must lie in [0,1]");
  }
  if (!(max_budget >= 0.0)) throw ValidationError("max_budget must be nonnegative");
  if (budget_rule == BudgetRule::list) {
    if (budgets.size() != num_arms)
      throw ValidationError("budgets list must have num_arms entries");
    for (double b : budgets)
      if (!(b >= 0.0)) throw ValidationError("budgets must be nonnegative");
  }
  if (learner_max_budget && !(*learner_max_budget >= 0.0))
    throw ValidationError("learner_max_budget must be nonnegative");
  if (policies.empty()) throw ValidationError("at least one policy is required");
  if (oracle != "exact_topk" && oracle != "greedy_coverage")
    throw ValidationError("oracle must be exact_topk or greedy_coverage");
  if (!(oracle_beta > 0.0 && oracle_beta <= 1.0))
    throw ValidationError("oracle_beta must lie in (0,1]");
  if (reward_family != "linear" && reward_family != "coverage")
    throw ValidationError("reward_family must be linear or coverage");
  if (reward_family == "coverage" && coverage_targets < 1)
    throw ValidationError("coverage needs at least one target");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in [0,1]");
  if (!(eta > 0.0 && eta < 1.0)) throw ValidationError("eta must lie in (0,1)");
  if (!(noise_sigma > 0.0)) throw ValidationError("noise_sigma must be positive");
  if (seeds.empty()) throw ValidationError("at least one seed is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw ValidationError("seeds must be distinct");
  if (replications != 0 && replications != seeds.size())
    throw ValidationError("replications must equal the number of seeds");
  if (strategy == StrategyKind::collusion_plan && num_arms > 6)
    throw ValidationError("collusion_plan strategy solves its program exactly; needs num_arms <= 6");
  if (collusion_y_cap < 0) throw ValidationError("collusion_y_cap must be nonnegative");
}

std::size_t ExperimentConfig::effective_stride() const {
  if (record_stride > 0) return record_stride;
  return horizon <= 10'000 ? 1 : 10;
}

double ExperimentConfig::effective_learner_budget() const {
  return learner_max_budget.value_or(max_budget);
}

OracleSpec ExperimentConfig::oracle_spec() const {
  OracleSpec base = oracle == "greedy_coverage" ? OracleSpec::greedy_coverage()
                                                : OracleSpec::exact_topk();
  return oracle_beta < 1.0 ? OracleSpec::failing(base, oracle_beta) : base;
}

PolicyParams ExperimentConfig::policy_params() const {
  PolicyParams p;
  p.gamma = gamma;
  p.learner_max_budget = effective_learner_budget();
  p.eta = eta;
  p.exp3_learning_rate = exp3_learning_rate;
  p.exp3_exploration = exp3_exploration;
  p.exp3_mc_samples = exp3_mc_samples;
  p.horizon = horizon;
  return p;
}

json to_json(const ExperimentConfig& c) {
  json policies = json::array();
  for (auto p : c.policies) policies.push_back(to_string(p));
  json doc = {
      {"num_arms", c.num_arms},
      {"action_size", c.action_size},
      {"horizon", c.horizon},
      {"means_rule", to_string(c.means_rule)},
      {"means", c.means},
      {"budget_rule", to_string(c.budget_rule)},
      {"max_budget", c.max_budget},
      {"budgets", c.budgets},
      {"learner_max_budget",
       c.learner_max_budget ? json(*c.learner_max_budget) : json(nullptr)},
      {"policies", policies},
      {"strategy", to_string(c.strategy)},
      {"oracle", c.oracle},
      {"oracle_beta", c.oracle_beta},
      {"reward_family", c.reward_family},
      {"coverage_targets", c.coverage_targets},
      {"distribution", to_string(c.distribution)},
      {"noise_sigma", c.noise_sigma},
      {"gamma", c.gamma},
      {"eta", c.eta},
      {"exp3_learning_rate", c.exp3_learning_rate},
      {"exp3_exploration", c.exp3_exploration},
      {"exp3_mc_samples", c.exp3_mc_samples},
      {"collusion_y_cap", c.collusion_y_cap},
      {"collusion_unit_weights", c.collusion_unit_weights},
      {"seeds", c.seeds},
      {"replications", c.replications},
      {"record_stride", c.record_stride},
      {"threads", c.threads},
  };
  return doc;
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  const std::set<std::string> known = [] {
    std::set<std::string> keys;
    const json defaults = to_json(ExperimentConfig{});
    for (const auto& [k, v] : defaults.items()) keys.insert(k);
    return keys;
  }();
  for (const auto& [k, v] : doc.items())
    if (!known.count(k)) throw ValidationError("unknown config key: " + k);

  ExperimentConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (doc.contains(key)) doc.at(key).get_to(field);
    };
    get("num_arms", c.num_arms);
    get("action_size", c.action_size);
    get("horizon", c.horizon);
    if (doc.contains("means_rule"))
      c.means_rule = means_rule_from_string(doc.at("means_rule").get<std::string>());
    get("means", c.means);
    if (doc.contains("budget_rule"))
      c.budget_rule = budget_rule_from_string(doc.at("budget_rule").get<std::string>());
    get("max_budget", c.max_budget);
    get("budgets", c.budgets);
    if (doc.contains("learner_max_budget") && !doc.at("learner_max_budget").is_null())
      c.learner_max_budget = doc.at("learner_max_budget").get<double>();
    if (doc.contains("policies")) {
      c.policies.clear();
      const auto& p = doc.at("policies");
      if (p.is_string()) {
        c.policies.push_back(policy_from_string(p.get<std::string>()));
      } else {
        for (const auto& name : p) c.policies.push_back(policy_from_string(name.get<std::string>()));
      }
    }
    if (doc.contains("strategy"))
      c.strategy = strategy_from_string(doc.at("strategy").get<std::string>());
    get("oracle", c.oracle);
    get("oracle_beta", c.oracle_beta);
    get("reward_family", c.reward_family);
    get("coverage_targets", c.coverage_targets);
    if (doc.contains("distribution"))
      c.distribution = distribution_from_string(doc.at("distribution").get<std::string>());
    get("noise_sigma", c.noise_sigma);
    get("gamma", c.gamma);
    get("eta", c.eta);
    get("exp3_learning_rate", c.exp3_learning_rate);
    get("exp3_exploration", c.exp3_exploration);
    get("exp3_mc_samples", c.exp3_mc_samples);
    get("collusion_y_cap", c.collusion_y_cap);
    get("collusion_unit_weights", c.collusion_unit_weights);
    get("seeds", c.seeds);
    get("replications", c.replications);
    get("record_stride", c.record_stride);
    get("threads", c.threads);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config field has the wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ValidationError("config file is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(doc);
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ValidationError("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  doc[key] = value;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::uint64_t h = fnv1a64(to_json(config).dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace scucb
