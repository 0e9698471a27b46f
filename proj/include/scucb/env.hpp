#pragma once

#include "scucb/common.hpp"
#include "scucb/rng.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace scucb {

// ---------------------------------------------------------------------------
// Reward families
// ---------------------------------------------------------------------------

/// r(S) = sum of the selected means.
struct LinearReward {};

/// Weighted probabilistic coverage: target j is reached by arm i with
/// probability mu_i * p_ij, independently across arms.
///   r(S) = sum_j w_j * (1 - prod_{i in S} (1 - mu_i * p_ij))
struct CoverageReward {
  Eigen::VectorXd weights;  // one per target
  Eigen::MatrixXd links;    // arms x targets, entries in [0,1]
};

using RewardFamily = std::variant<LinearReward, CoverageReward>;

enum class Distribution { bernoulli, truncated_gaussian };

std::string to_string(Distribution d);
Distribution distribution_from_string(const std::string& name);

/// Expected reward of a subset under a mean vector. Works for any Eigen
/// vector expression; estimates above one are allowed and for the coverage
/// family the per-edge activation probability is clamped into [0,1].
template <typename Derived>
typename Derived::Scalar expected_reward(const RewardFamily& family,
                                         const Eigen::MatrixBase<Derived>& mu,
                                         std::span<const std::size_t> subset) {
  using Scalar = typename Derived::Scalar;
  if (std::holds_alternative<LinearReward>(family)) {
    Scalar total(0);
    for (std::size_t i : subset) total += mu(static_cast<Eigen::Index>(i));
    return total;
  }
  const auto& cov = std::get<CoverageReward>(family);
  Scalar total(0);
  for (Eigen::Index j = 0; j < cov.weights.size(); ++j) {
    Scalar miss(1);
    for (std::size_t i : subset) {
      const auto row = static_cast<Eigen::Index>(i);
      const Scalar act = std::clamp<Scalar>(
          mu(row) * static_cast<Scalar>(cov.links(row, j)), Scalar(0),
          Scalar(1));
      miss *= Scalar(1) - act;
    }
    total += static_cast<Scalar>(cov.weights(j)) * (Scalar(1) - miss);
  }
  return total;
}

/// Bounded-smoothness modulus f(lambda) declared for a family:
/// linear -> k * lambda, coverage -> (sum_j w_j sum_i p_ij) * lambda.
double smoothness(const RewardFamily& family, std::size_t action_size,
                  double lambda);

/// Inverse of `smoothness` in its argument.
double inverse_smoothness(const RewardFamily& family, std::size_t action_size,
                          double gap);

// ---------------------------------------------------------------------------
// Problem instance
// ---------------------------------------------------------------------------

struct ProblemInstance {
  Eigen::VectorXd means;
  Eigen::VectorXd budgets;
  std::size_t action_size = 1;
  RewardFamily family = LinearReward{};
  Distribution distribution = Distribution::bernoulli;
  double noise_sigma = 0.25;  // truncated-gaussian only

  std::size_t num_arms() const { return static_cast<std::size_t>(means.size()); }
  double max_budget() const { return budgets.size() ? budgets.maxCoeff() : 0.0; }

  /// Throws ValidationError on any violated range or shape invariant.
  void validate() const;

  /// Throws ConstraintError unless `subset` is a sorted, duplicate-free set
  /// of exactly `action_size` valid arm indices.
  void check_subset(std::span<const std::size_t> subset) const;
};

double expected_reward(const ProblemInstance& instance,
                       std::span<const std::size_t> subset);

/// Draws x_{i,t} for one arm.
double sample_raw_reward(const ProblemInstance& instance, std::size_t arm,
                         Rng& rng);

// ---------------------------------------------------------------------------
// Budget ledger and per-arm history
// ---------------------------------------------------------------------------

class BudgetLedger {
 public:
  BudgetLedger() = default;
  explicit BudgetLedger(Eigen::VectorXd budgets);

  std::size_t num_arms() const { return static_cast<std::size_t>(budgets_.size()); }
  double budget(std::size_t arm) const;
  double spent(std::size_t arm) const;
  double remaining(std::size_t arm) const;
  const Eigen::VectorXd& spent() const { return spent_; }

  /// Debits up to `amount` from the arm, clamped to what is left.
  /// Returns the amount actually debited.
  double debit(std::size_t arm, double amount);

 private:
  void check(std::size_t arm) const;

  Eigen::VectorXd budgets_;
  Eigen::VectorXd spent_;
};

struct PullRecord {
  std::size_t round = 0;
  double raw = 0.0;
  double manipulation = 0.0;
};

/// Append-only record of one arm's own pulls.
class ArmHistory {
 public:
  void append(const PullRecord& record);

  std::size_t pull_count() const { return pulls_.size(); }
  const std::vector<PullRecord>& pulls() const { return pulls_; }
  bool pulled_at(std::size_t round) const;
  /// Pull indicators I_{i,1..t}.
  std::vector<bool> indicators(std::size_t through_round) const;

 private:
  std::vector<PullRecord> pulls_;
};

// ---------------------------------------------------------------------------
// Manipulation strategies
// ---------------------------------------------------------------------------

enum class StrategyKind { none, lsi, random, pb_lsi, pd_lsi, pbd_lsi, collusion_plan };

std::string to_string(StrategyKind kind);
StrategyKind strategy_from_string(const std::string& name);

struct ManipulationStrategy {
  StrategyKind kind = StrategyKind::none;
  /// Prioritized LSI: amount spent on the first pull.
  double initial_spend = 0.0;
  /// Prioritized LSI: earliest round at which the remainder is spent.
  std::size_t burst_round = 0;
  /// Collusion plan: amount to spend on the n-th pull (0-based).
  std::vector<double> schedule;

  static ManipulationStrategy none() { return {}; }
  static ManipulationStrategy lsi() { return {.kind = StrategyKind::lsi, .schedule = {}}; }
  static ManipulationStrategy random() { return {.kind = StrategyKind::random, .schedule = {}}; }
  static ManipulationStrategy prioritized(StrategyKind kind, double initial,
                                          std::size_t burst_round);
  static ManipulationStrategy plan(std::vector<double> schedule);
};

/// z_{i,t} for an arm being pulled in round t. Reads only the arm's own
/// history and its own ledger entry; result lies in [0, remaining].
double compute_manipulation(const ManipulationStrategy& strategy,
                            const ArmHistory& history,
                            const BudgetLedger& ledger, std::size_t arm,
                            std::size_t t, Rng& rng);

// ---------------------------------------------------------------------------
// Environment step
// ---------------------------------------------------------------------------

struct RoundTrace {
  std::size_t round = 0;
  Subset subset;
  std::vector<double> raw;           // x_{i,t}, aligned with subset
  std::vector<double> manipulation;  // z_{i,t}
  std::vector<double> observed;      // x + z, unclipped
  double expected_reward = 0.0;      // r_mu(S_t), hidden from the learner

  bool operator==(const RoundTrace&) const = default;
};

/// Independent random streams per arm so that one arm's draws never depend
/// on which other arms were pulled.
struct EnvStreams {
  std::vector<Rng> reward;
  std::vector<Rng> strategy;

  static EnvStreams from_seed(std::uint64_t seed, std::size_t num_arms);
};

RoundTrace env_step(const ProblemInstance& instance,
                    std::span<const ManipulationStrategy> strategies,
                    BudgetLedger& ledger, std::vector<ArmHistory>& histories,
                    std::span<const std::size_t> subset, std::size_t t,
                    EnvStreams& streams);

/// Owns all mutable environment state for one replication.
class Environment {
 public:
  Environment(ProblemInstance instance,
              std::vector<ManipulationStrategy> strategies, std::uint64_t seed);

  RoundTrace step(std::span<const std::size_t> subset, std::size_t t);

  const ProblemInstance& instance() const { return instance_; }
  const BudgetLedger& ledger() const { return ledger_; }
  const ArmHistory& history(std::size_t arm) const { return histories_.at(arm); }

 private:
  ProblemInstance instance_;
  std::vector<ManipulationStrategy> strategies_;
  BudgetLedger ledger_;
  std::vector<ArmHistory> histories_;
  EnvStreams streams_;
};

}  // namespace scucb
