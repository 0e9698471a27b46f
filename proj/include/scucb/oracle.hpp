#pragma once

#include "scucb/common.hpp"
#include "scucb/env.hpp"
#include "scucb/rng.hpp"

#include <memory>
#include <string>

namespace scucb {

enum class OracleKind { exact_topk, greedy_coverage, failing_wrapper };

/// An (alpha, beta)-approximation oracle description. Value type; the
/// wrapped oracle of a failing_wrapper is shared immutably.
class OracleSpec {
 public:
  static OracleSpec exact_topk();
  static OracleSpec greedy_coverage();
  /// Returns the inner oracle's answer with probability `beta`, otherwise a
  /// uniformly random feasible subset.
  static OracleSpec failing(const OracleSpec& inner, double beta);

  OracleKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  /// Success probability injected by this layer alone (1 for base oracles).
  double failure_layer_beta() const { return layer_beta_; }
  const OracleSpec* inner() const { return inner_.get(); }

  std::string describe() const;

 private:
  OracleKind kind_ = OracleKind::exact_topk;
  double alpha_ = 1.0;
  double beta_ = 1.0;
  double layer_beta_ = 1.0;
  std::shared_ptr<const OracleSpec> inner_;
};

struct InstanceShape {
  std::size_t num_arms = 0;
  std::size_t action_size = 1;
  RewardFamily family = LinearReward{};

  static InstanceShape of(const ProblemInstance& instance) {
    return {instance.num_arms(), instance.action_size, instance.family};
  }
};

struct OracleResult {
  Subset subset;
  /// True when a failing_wrapper took its failure branch (event F_t).
  bool failed = false;
};

OracleResult oracle_select(const OracleSpec& spec,
                           const Eigen::VectorXd& estimates,
                           const InstanceShape& shape, Rng& rng);

/// k largest entries; ties broken toward the lower index. Result sorted.
Subset top_k(const Eigen::VectorXd& values, std::size_t k);

/// Standard greedy maximisation of the family's reward at `estimates`.
Subset greedy_select(const Eigen::VectorXd& estimates, const InstanceShape& shape);

Subset uniform_subset(std::size_t m, std::size_t k, Rng& rng);

/// Fraction of `trials` oracle calls whose answer reaches alpha * OPT at the
/// given estimates, with OPT found by enumeration (m <= 15).
double oracle_guarantee_check(const OracleSpec& spec,
                              const Eigen::VectorXd& estimates,
                              const InstanceShape& shape, std::size_t trials,
                              Rng& rng);

}  // namespace scucb
