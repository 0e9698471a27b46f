#pragma once

#include "scucb/env.hpp"
#include "scucb/oracle.hpp"
#include "scucb/policy.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scucb {

enum class MeansRule { uniform, list };
enum class BudgetRule { uniform_random, fixed, list };

/// Everything needed to reproduce an experiment. Serialises to a flat JSON
/// object whose keys are the field names below.
struct ExperimentConfig {
  std::size_t num_arms = 10;
  std::size_t action_size = 2;
  std::size_t horizon = 5000;

  MeansRule means_rule = MeansRule::uniform;
  std::vector<double> means;  // means_rule == list

  BudgetRule budget_rule = BudgetRule::uniform_random;
  double max_budget = 50.0;
  std::vector<double> budgets;  // budget_rule == list
  /// B_max handed to SCUCB; defaults to max_budget.
  std::optional<double> learner_max_budget;

  std::vector<PolicyKind> policies{PolicyKind::scucb, PolicyKind::cucb};
  StrategyKind strategy = StrategyKind::lsi;

  std::string oracle = "exact_topk";  // or greedy_coverage
  double oracle_beta = 1.0;           // < 1 wraps the oracle in failing_wrapper

  std::string reward_family = "linear";  // or coverage
  std::size_t coverage_targets = 5;
  Distribution distribution = Distribution::bernoulli;
  double noise_sigma = 0.25;

  double gamma = 0.2;
  double eta = 0.1;
  double exp3_learning_rate = 0.0;
  double exp3_exploration = 0.05;
  std::size_t exp3_mc_samples = 1000;

  std::int64_t collusion_y_cap = 50;
  bool collusion_unit_weights = false;

  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t replications = 0;   // 0 = number of seeds
  std::size_t record_stride = 0;  // 0 = 1 for T <= 1e4, else 10
  std::size_t threads = 0;        // 0 = hardware concurrency

  /// Throws ValidationError describing the first problem found.
  void validate() const;

  std::size_t effective_stride() const;
  double effective_learner_budget() const;
  OracleSpec oracle_spec() const;
  PolicyParams policy_params() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Unknown keys are rejected so typos do not silently fall back to defaults.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// Applies `key=value` with the value parsed as JSON when possible and as a
/// bare string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Stable 64-bit hash of the canonical JSON form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

std::string to_string(MeansRule rule);
std::string to_string(BudgetRule rule);

}  // namespace scucb
