#pragma once

#include "scucb/common.hpp"
#include "scucb/env.hpp"
#include "scucb/policy.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace scucb {

/// Ground-truth optimum and suboptimality gaps of an instance.
struct GapReport {
  double alpha = 1.0;
  double opt = 0.0;
  Subset optimal;  // S*, lexicographically first maximiser
  /// alpha * OPT; subsets with reward strictly below it form S_B.
  double threshold = 0.0;
  std::vector<Subset> suboptimal;
  /// Per-arm gaps; empty when the arm is in no suboptimal subset.
  std::vector<std::optional<double>> arm_gap_min;
  std::vector<std::optional<double>> arm_gap_max;
  /// Reductions over arms with defined gaps; empty when S_B is empty.
  std::optional<double> gap_min;
  std::optional<double> gap_max;

  bool is_suboptimal_reward(double reward) const { return reward < threshold; }
};

/// Largest number of subsets compute_opt_and_gaps will enumerate.
inline constexpr std::uint64_t kMaxEnumeratedSubsets = 2'000'000;

GapReport compute_opt_and_gaps(const ProblemInstance& instance, double alpha);

/// S* and OPT without building the full gap table. Uses top-k for the linear
/// family and enumeration otherwise.
std::pair<Subset, double> optimal_subset(const ProblemInstance& instance);

/// Per-round hidden rewards and the cumulative regret they induce.
struct RegretTrace {
  std::vector<Subset> subsets;           // S_1..S_T
  std::vector<double> rewards;           // r_mu(S_t)
  std::vector<double> cumulative_regret; // R_t
  std::size_t init_rounds = 0;           // m
};

/// T * alpha * beta * OPT - sum_{t<=T} r_mu(S_t). Negative values are kept.
double regret_of_trace(std::span<const double> rewards, double opt, double alpha,
                       double beta, std::size_t horizon);

/// Closed-form SCUCB regret bound with natural log:
///   m * D_max * ((8 B_max f^-1(D_min) + 6 ln T) / f^-1(D_min)^2 + pi^2/3 + 1)
template <typename InverseSmoothness>
double theorem1_bound(std::size_t m, double gap_max, double gap_min,
                      double max_budget, std::size_t horizon,
                      InverseSmoothness&& f_inv) {
  if (!(gap_min > 0.0)) throw DomainError("regret bound needs a positive gap");
  const double x = f_inv(gap_min);
  if (!(x > 0.0)) throw DomainError("inverse smoothness of the gap must be > 0");
  const double pi = std::numbers::pi;
  return static_cast<double>(m) * gap_max *
         ((8.0 * max_budget * x + 6.0 * std::log(static_cast<double>(horizon))) /
              (x * x) +
          pi * pi / 3.0 + 1.0);
}

/// Confidence-event snapshot at the start of round t.
struct Lemma1Snapshot {
  Eigen::VectorXd radius;     // Lambda_{i,t}
  Eigen::VectorXd deviation;  // |mu~_{i,t-1} - mu_i|
  std::vector<bool> within;   // per-arm flag
  bool event_holds = true;    // E_t
};

/// Lambda_{i,t} = sqrt(3 ln t / 2K) + rho_{i,t-1} / K using the true spend
/// from the ledger. Requires t > m and every arm pulled.
Lemma1Snapshot lemma1_monitor(const Eigen::VectorXd& true_means,
                              const PolicyState& state,
                              const BudgetLedger& ledger, std::size_t t);

/// 2 m / t^2, the failure-probability series of the confidence event.
inline double lemma1_failure_bound(std::size_t m, std::size_t t) {
  const double td = static_cast<double>(t);
  return 2.0 * static_cast<double>(m) / (td * td);
}

/// Budget needed for a suboptimal arm with gap delta to collect `pulls`
/// pulls under the ucb_eta learner: (delta - sqrt(2 ln(K^2/eta^2)/K)) K,
/// floored at zero.
double theorem2_budget_check(double delta, std::int64_t pulls, double eta);

/// Replays the proof's counters: N_{i,m} = 1 and each round t > m with
/// S_t in S_B increments the member with the smallest counter (lowest index
/// on ties).
std::vector<std::int64_t> suboptimal_pull_counters(const RegretTrace& trace,
                                                   double threshold,
                                                   std::size_t num_arms);

std::vector<std::int64_t> suboptimal_pull_counters(const RegretTrace& trace,
                                                   const GapReport& gaps,
                                                   std::size_t num_arms);

}  // namespace scucb
