#pragma once

#include "scucb/common.hpp"
#include "scucb/env.hpp"

#include <cstdint>
#include <vector>

namespace scucb {

enum class CollusionObjective {
  gap_weighted,  // maximise sum_i delta_i * Y_i (regret maximisation)
  unit           // maximise sum_i Y_i (suboptimal-pull maximisation)
};

/// Small-scale collusion program among strategic arms. Arm i targets Y_i
/// extra pulls to be completed by round t_i; the arms take turns in the
/// order of a permutation, and arm i_j's deadline must cover every pull
/// scheduled before and including its own.
struct CollusionProgram {
  Eigen::VectorXd budgets;
  Eigen::VectorXd gaps;
  std::int64_t horizon = 0;  // 0 means unbounded deadlines
  CollusionObjective objective = CollusionObjective::gap_weighted;

  std::size_t num_arms() const { return static_cast<std::size_t>(budgets.size()); }
  double weight(std::size_t arm) const;
  void validate() const;
};

struct CollusionSolution {
  std::vector<std::size_t> permutation;
  std::vector<std::int64_t> pulls;      // Y_i, indexed by arm
  std::vector<std::int64_t> deadlines;  // t_i, indexed by arm: prefix sum through i
  double objective = 0.0;
};

/// B/Y + sqrt(3 ln t / Y) >= delta + sqrt(3 ln t). Y = 0 is always feasible.
bool collusion_constraint_holds(double budget, double gap, std::int64_t pulls,
                                std::int64_t deadline);

/// sum_i w_i Y_i accumulated in arm-index order.
double collusion_objective(const CollusionProgram& program,
                           const std::vector<std::int64_t>& pulls);

/// Exact maximiser over every permutation and every Y in {0..y_cap}^m.
/// Deadlines are set to their lower bound sum_{l<=j} Y_{i_l}: for Y >= 1 the
/// slack sqrt(3 ln t)(1/sqrt(Y) - 1) is nonincreasing in t, so the smallest
/// admissible deadline is always the easiest to satisfy. Within a permutation
/// the Y grid is searched by dynamic programming over prefix sums. Ties go
/// to the lexicographically smallest (permutation, Y).
CollusionSolution solve_collusion_bruteforce(const CollusionProgram& program,
                                             std::int64_t y_cap);

/// Throws ValidationError if the solution breaks any program constraint.
void validate_collusion_solution(const CollusionProgram& program,
                                 const CollusionSolution& solution,
                                 double tolerance = 1e-9);

/// Per-arm strategies realising a solution: arm i spends B_i / Y_i on each of
/// its first Y_i pulls, so its manipulated mean carries the B_i / Y_i lift
/// the program assumes through pull Y_i. Arms with Y_i = 0 do not manipulate.
std::vector<ManipulationStrategy> plan_to_strategy(const CollusionProgram& program,
                                                   const CollusionSolution& solution);

enum class LsiVariant { pb, pd, pbd };

LsiVariant lsi_variant_from_string(const std::string& name);
StrategyKind strategy_kind(LsiVariant variant);

struct SpendEntry {
  std::size_t arm = 0;
  std::size_t round = 0;  // 1-based round of the spend
  double amount = 0.0;
};

struct LsiVariantPlan {
  std::vector<std::size_t> order;  // arms with positive budget, burst order
  std::vector<SpendEntry> spends;
};

/// Prioritized lump-sum schedules. Each arm with budget spends
/// min(delta_i, B_i) in its initialization round (round i+1) and the rest in
/// round m + j, j being its 1-based position in the order:
///   pb: budget descending, pd: delta ascending, pbd: B - delta ascending.
/// Ties resolve to the lower arm index.
LsiVariantPlan lsi_variant_plan(LsiVariant variant, const Eigen::VectorXd& budgets,
                                const Eigen::VectorXd& deltas, std::size_t m);

/// Strategies that replay an LSI variant plan inside the environment.
std::vector<ManipulationStrategy> lsi_variant_strategies(
    LsiVariant variant, const Eigen::VectorXd& budgets,
    const Eigen::VectorXd& deltas);

}  // namespace scucb
