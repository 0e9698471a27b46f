#pragma once

#include "scucb/common.hpp"
#include "scucb/oracle.hpp"
#include "scucb/rng.hpp"

#include <cmath>
#include <functional>
#include <span>
#include <string>

namespace scucb {

enum class PolicyKind {
  scucb,   // budget-aware UCB: mean + gamma * sqrt(3 ln t / 2K) + B_max / K
  cucb,    // scucb with B_max = 0
  tscb,    // combinatorial Thompson sampling with Beta posteriors
  exp3cb,  // exponential weights with importance-weighted losses
  ucb_eta  // mean + sqrt(2 ln(K^2 / eta^2) / K), the single-play learner of
           // the budget lower-bound analysis
};

std::string to_string(PolicyKind kind);
PolicyKind policy_from_string(const std::string& name);

struct PolicyParams {
  double gamma = 1.0;               // scales only the sqrt exploration term
  double learner_max_budget = 0.0;  // B_max as known to the learner
  double eta = 0.1;                 // ucb_eta confidence parameter
  double exp3_learning_rate = 0.0;  // 0 selects sqrt(2 ln m / (m T))
  double exp3_exploration = 0.05;   // uniform mixing weight
  std::size_t exp3_mc_samples = 1000;
  std::size_t horizon = 0;          // only used to derive the EXP3 rate
};

struct PolicyDecision {
  Subset subset;
  bool oracle_failed = false;
};

/// Learner-side statistics for one run.
class PolicyState {
 public:
  PolicyState(PolicyKind kind, std::size_t num_arms, PolicyParams params = {});

  PolicyKind kind() const { return kind_; }
  const PolicyParams& params() const { return params_; }
  std::size_t num_arms() const { return static_cast<std::size_t>(counts_.size()); }

  /// K_{i,t}
  const CountVector& counts() const { return counts_; }
  /// Running sum of observed (manipulated) signals per arm.
  const Eigen::VectorXd& signal_sums() const { return sums_; }
  /// mu~_{i,t}; zero for arms never pulled.
  Eigen::VectorXd means() const;
  double mean(std::size_t arm) const;

  // Thompson posteriors Beta(a_i, b_i).
  const Eigen::VectorXd& beta_a() const { return beta_a_; }
  const Eigen::VectorXd& beta_b() const { return beta_b_; }
  void set_posterior(std::size_t arm, double a, double b);

  /// EXP3 weights, scaled so the largest is one.
  Eigen::VectorXd weights() const;
  void set_log_weights(Eigen::VectorXd log_weights);
  double exp3_rate() const;
  /// Sampling distribution the EXP3 draw uses.
  Eigen::VectorXd exp3_distribution() const;
  /// Inclusion probabilities estimated at the last EXP3 selection.
  const Eigen::VectorXd& inclusion_probabilities() const { return inclusion_; }

 private:
  friend void policy_update(PolicyState&, std::span<const std::size_t>,
                            std::span<const double>, std::size_t, Rng&);
  friend PolicyDecision policy_select(PolicyState&, std::size_t,
                                      const OracleSpec&, const InstanceShape&,
                                      Rng&, Rng&);

  PolicyKind kind_;
  PolicyParams params_;
  CountVector counts_;
  Eigen::VectorXd sums_;
  Eigen::VectorXd beta_a_;
  Eigen::VectorXd beta_b_;
  Eigen::VectorXd log_weights_;
  Eigen::VectorXd inclusion_;
};

/// SCUCB index for one arm. `t` is real-valued so the formula can be
/// evaluated off the integer grid; callers pass the round number.
template <typename Scalar>
Scalar ucb_index(Scalar mean, std::int64_t pulls, Scalar t, Scalar max_budget,
                 Scalar gamma) {
  if (pulls < 1) throw DomainError("ucb_index requires at least one pull");
  const Scalar k = static_cast<Scalar>(pulls);
  return mean + gamma * std::sqrt(Scalar(3) * std::log(t) / (Scalar(2) * k)) +
         max_budget / k;
}

/// All SCUCB indices at once.
Eigen::VectorXd ucb_indices(const PolicyState& state, std::size_t t,
                            double max_budget, double gamma);

/// Index of the ucb_eta learner.
double eta_ucb_index(double mean, std::int64_t pulls, double eta);

/// Subset played in initialization round t (1-based): arm t-1 plus the
/// lowest-indexed other arms up to size k. Arms are 0-based.
Subset initialization_subset(std::size_t t, std::size_t m, std::size_t k);

/// Chooses S_t for a post-initialization round t > m. Posterior sampling
/// and EXP3 draws use `policy_rng`; oracle randomness uses `oracle_rng`.
PolicyDecision policy_select(PolicyState& state, std::size_t t,
                             const OracleSpec& oracle, const InstanceShape& shape,
                             Rng& policy_rng, Rng& oracle_rng);

inline PolicyDecision policy_select(PolicyState& state, std::size_t t,
                                    const OracleSpec& oracle,
                                    const InstanceShape& shape, Rng& rng) {
  return policy_select(state, t, oracle, shape, rng, rng);
}

/// Folds semi-bandit feedback for the played subset into the state.
void policy_update(PolicyState& state, std::span<const std::size_t> subset,
                   std::span<const double> observed, std::size_t t, Rng& rng);

using EnvCallback =
    std::function<std::vector<double>(const Subset& subset, std::size_t t)>;

/// Runs rounds 1..m with the fixed initialization subsets.
PolicyState& initialize(PolicyState& state, const InstanceShape& shape,
                        const EnvCallback& env, Rng& rng);

}  // namespace scucb
