#include "scucb/collusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace scucb {

double CollusionProgram::weight(std::size_t arm) const {
  return objective == CollusionObjective::unit
             ? 1.0
             : gaps(static_cast<Eigen::Index>(arm));
}

void CollusionProgram::validate() const {
  if (budgets.size() == 0) throw ValidationError("collusion program needs arms");
  if (gaps.size() != budgets.size())
    throw ValidationError("collusion program: one gap per budget required");
  if ((budgets.array() < 0.0).any() || !budgets.allFinite())
    throw ValidationError("collusion budgets must be finite and nonnegative");
  if (!gaps.allFinite()) throw ValidationError("collusion gaps must be finite");
  if (horizon < 0) throw ValidationError("collusion horizon must be nonnegative");
}

bool collusion_constraint_holds(double budget, double gap, std::int64_t pulls,
                                std::int64_t deadline) {
  if (pulls == 0) return true;
  if (pulls < 0 || deadline < 1) return false;
  const double y = static_cast<double>(pulls);
  const double explore = 3.0 * std::log(static_cast<double>(deadline));
  return budget / y + std::sqrt(explore / y) >= gap + std::sqrt(explore);
}

double collusion_objective(const CollusionProgram& program,
                           const std::vector<std::int64_t>& pulls) {
  double total = 0.0;
  for (std::size_t i = 0; i < pulls.size(); ++i)
    total += program.weight(i) * static_cast<double>(pulls[i]);
  return total;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class PermutationDp {
 public:
  PermutationDp(const CollusionProgram& program, std::int64_t y_cap)
      : program_(program), m_(program.num_arms()), y_cap_(y_cap),
        max_sum_(static_cast<std::int64_t>(m_) * y_cap) {
    // feasible_[a][y * (max_sum_ + 1) + t]
    feasible_.resize(m_);
    for (std::size_t a = 0; a < m_; ++a) {
      auto& table = feasible_[a];
      table.assign(static_cast<std::size_t>((y_cap_ + 1) * (max_sum_ + 1)), 0);
      const double b = program.budgets(static_cast<Eigen::Index>(a));
      const double g = program.gaps(static_cast<Eigen::Index>(a));
      for (std::int64_t y = 0; y <= y_cap_; ++y)
        for (std::int64_t t = 0; t <= max_sum_; ++t) {
          bool ok = collusion_constraint_holds(b, g, y, t);
          if (y > 0 && program.horizon > 0 && t > program.horizon) ok = false;
          table[index(y, t)] = ok;
        }
    }
  }

  /// Best objective for a permutation with some Y values pinned.
  double best(const std::vector<std::size_t>& perm,
              const std::vector<std::optional<std::int64_t>>& pinned) const {
    std::vector<double> next(static_cast<std::size_t>(max_sum_ + 1), 0.0);
    std::vector<double> cur(next.size());
    for (std::size_t j = m_; j-- > 0;) {
      const std::size_t a = perm[j];
      const double w = program_.weight(a);
      const std::int64_t lo = pinned[a] ? *pinned[a] : 0;
      const std::int64_t hi = pinned[a] ? *pinned[a] : y_cap_;
      const std::int64_t reachable = static_cast<std::int64_t>(j) * y_cap_;
      std::fill(cur.begin(), cur.end(), kNegInf);
      for (std::int64_t s = 0; s <= reachable; ++s) {
        double best_here = kNegInf;
        for (std::int64_t y = lo; y <= hi; ++y) {
          const std::int64_t t = s + y;
          if (t > max_sum_ || !feasible_[a][index(y, t)]) continue;
          const double tail = next[static_cast<std::size_t>(t)];
          if (tail == kNegInf) continue;
          best_here = std::max(best_here, w * static_cast<double>(y) + tail);
        }
        cur[static_cast<std::size_t>(s)] = best_here;
      }
      std::swap(cur, next);
    }
    return next[0];
  }

 private:
  std::size_t index(std::int64_t y, std::int64_t t) const {
    return static_cast<std::size_t>(y * (max_sum_ + 1) + t);
  }

  const CollusionProgram& program_;
  std::size_t m_;
  std::int64_t y_cap_;
  std::int64_t max_sum_;
  std::vector<std::vector<char>> feasible_;
};

bool close_enough(double value, double target) {
  return value >= target - 1e-12 * std::max(1.0, std::abs(target));
}

}  // namespace

CollusionSolution solve_collusion_bruteforce(const CollusionProgram& program,
                                             std::int64_t y_cap) {
  program.validate();
  if (y_cap < 0) throw ValidationError("Y_cap must be nonnegative");
  const std::size_t m = program.num_arms();
  if (m > 6) throw CapabilityError("collusion solver supports at most 6 arms");
  double work = static_cast<double>(m) * static_cast<double>(m * y_cap + 1) *
                static_cast<double>(y_cap + 1);
  for (std::size_t i = 2; i <= m; ++i) work *= static_cast<double>(i);
  if (work > 2e9) throw CapabilityError("collusion search grid too large");

  const PermutationDp dp(program, y_cap);
  const std::vector<std::optional<std::int64_t>> free_pins(m);

  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::size_t> best_perm = perm;
  double best_value = kNegInf;
  do {
    const double v = dp.best(perm, free_pins);
    if (!close_enough(best_value, v)) {
      best_value = v;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  // Lexicographically smallest Y (in arm order) that still reaches the best
  // value under the winning permutation.
  std::vector<std::optional<std::int64_t>> pins(m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::int64_t y = 0; y <= y_cap; ++y) {
      pins[a] = y;
      if (close_enough(dp.best(best_perm, pins), best_value)) break;
    }
  }

  CollusionSolution sol;
  sol.permutation = best_perm;
  sol.pulls.resize(m);
  sol.deadlines.resize(m);
  for (std::size_t a = 0; a < m; ++a) sol.pulls[a] = *pins[a];
  std::int64_t prefix = 0;
  for (std::size_t a : best_perm) {
    prefix += sol.pulls[a];
    sol.deadlines[a] = prefix;
  }
  sol.objective = collusion_objective(program, sol.pulls);
  return sol;
}

void validate_collusion_solution(const CollusionProgram& program,
                                 const CollusionSolution& solution,
                                 double tolerance) {
  program.validate();
  const std::size_t m = program.num_arms();
  if (solution.permutation.size() != m || solution.pulls.size() != m ||
      solution.deadlines.size() != m)
    throw ValidationError("collusion solution has the wrong shape");
  std::vector<std::size_t> sorted = solution.permutation;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < m; ++i)
    if (sorted[i] != i) throw ValidationError("solution order is not a permutation");

  std::int64_t prefix = 0;
  for (std::size_t a : solution.permutation) {
    const std::int64_t y = solution.pulls[a];
    const std::int64_t t = solution.deadlines[a];
    if (y < 0) throw ValidationError("negative pull target");
    prefix += y;
    if (y == 0) continue;
    if (t < prefix)
      throw ValidationError("deadline of arm " + std::to_string(a) +
                            " precedes the pulls scheduled before it");
    if (program.horizon > 0 && t > program.horizon)
      throw ValidationError("deadline exceeds the horizon");
    const double yd = static_cast<double>(y);
    const double explore = 3.0 * std::log(static_cast<double>(t));
    const double lhs = program.budgets(static_cast<Eigen::Index>(a)) / yd +
                       std::sqrt(explore / yd);
    const double rhs = program.gaps(static_cast<Eigen::Index>(a)) + std::sqrt(explore);
    if (lhs < rhs - tolerance)
      throw ValidationError("budget constraint violated for arm " + std::to_string(a));
  }
  const double obj = collusion_objective(program, solution.pulls);
  if (std::abs(obj - solution.objective) > tolerance * std::max(1.0, std::abs(obj)))
    throw ValidationError("reported objective does not match the pull targets");
}

std::vector<ManipulationStrategy> plan_to_strategy(const CollusionProgram& program,
                                                   const CollusionSolution& solution) {
  validate_collusion_solution(program, solution);
  std::vector<ManipulationStrategy> out(program.num_arms());
  for (std::size_t a = 0; a < out.size(); ++a) {
    const std::int64_t y = solution.pulls[a];
    const double b = program.budgets(static_cast<Eigen::Index>(a));
    if (y <= 0 || b <= 0.0) continue;
    out[a] = ManipulationStrategy::plan(
        std::vector<double>(static_cast<std::size_t>(y), b / static_cast<double>(y)));
  }
  return out;
}

// -- LSI variants -------------------------------------------------------------

LsiVariant lsi_variant_from_string(const std::string& name) {
  if (name == "pb" || name == "pb_lsi") return LsiVariant::pb;
  if (name == "pd" || name == "pd_lsi") return LsiVariant::pd;
  if (name == "pbd" || name == "pbd_lsi") return LsiVariant::pbd;
  throw ValidationError("unknown LSI variant: " + name);
}

StrategyKind strategy_kind(LsiVariant variant) {
  switch (variant) {
    case LsiVariant::pb: return StrategyKind::pb_lsi;
    case LsiVariant::pd: return StrategyKind::pd_lsi;
    case LsiVariant::pbd: return StrategyKind::pbd_lsi;
  }
  return StrategyKind::none;
}

namespace {

std::vector<std::size_t> burst_order(LsiVariant variant, const Eigen::VectorXd& budgets,
                                     const Eigen::VectorXd& deltas) {
  if (budgets.size() != deltas.size())
    throw ShapeError("one delta per budget required");
  std::vector<std::size_t> arms;
  for (Eigen::Index i = 0; i < budgets.size(); ++i)
    if (budgets(i) > 0.0) arms.push_back(static_cast<std::size_t>(i));
  auto key = [&](std::size_t a) {
    const auto i = static_cast<Eigen::Index>(a);
    switch (variant) {
      case LsiVariant::pb: return -budgets(i);
      case LsiVariant::pd: return deltas(i);
      case LsiVariant::pbd: return budgets(i) - deltas(i);
    }
    return 0.0;
  };
  std::stable_sort(arms.begin(), arms.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  return arms;
}

}  // namespace

LsiVariantPlan lsi_variant_plan(LsiVariant variant, const Eigen::VectorXd& budgets,
                                const Eigen::VectorXd& deltas, std::size_t m) {
  if (static_cast<std::size_t>(budgets.size()) != m)
    throw ShapeError("lsi_variant_plan: budgets must have m entries");
  LsiVariantPlan plan;
  plan.order = burst_order(variant, budgets, deltas);
  for (std::size_t pos = 0; pos < plan.order.size(); ++pos) {
    const std::size_t a = plan.order[pos];
    const double b = budgets(static_cast<Eigen::Index>(a));
    const double first = std::clamp(deltas(static_cast<Eigen::Index>(a)), 0.0, b);
    if (first > 0.0) plan.spends.push_back({a, a + 1, first});
    if (b - first > 0.0) plan.spends.push_back({a, m + pos + 1, b - first});
  }
  return plan;
}

std::vector<ManipulationStrategy> lsi_variant_strategies(
    LsiVariant variant, const Eigen::VectorXd& budgets,
    const Eigen::VectorXd& deltas) {
  const auto m = static_cast<std::size_t>(budgets.size());
  const auto order = burst_order(variant, budgets, deltas);
  std::vector<ManipulationStrategy> out(m);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t a = order[pos];
    const double b = budgets(static_cast<Eigen::Index>(a));
    const double first = std::clamp(deltas(static_cast<Eigen::Index>(a)), 0.0, b);
    out[a] = ManipulationStrategy::prioritized(strategy_kind(variant), first,
                                               m + pos + 1);
  }
  return out;
}

}  // namespace scucb
