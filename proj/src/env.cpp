#include "scucb/env.hpp"

#include <algorithm>
#include <cmath>

namespace scucb {

std::string to_string(Distribution d) {
  switch (d) {
    case Distribution::bernoulli: return "bernoulli";
    case Distribution::truncated_gaussian: return "truncated_gaussian";
  }
  return "unknown";
}

Distribution distribution_from_string(const std::string& name) {
  if (name == "bernoulli") return Distribution::bernoulli;
  if (name == "truncated_gaussian" || name == "gaussian")
    return Distribution::truncated_gaussian;
  throw ValidationError("unknown distribution: " + name);
}

namespace {

double coverage_mass(const CoverageReward& cov) {
  return cov.weights.dot(cov.links.colwise().sum().transpose());
}

}  // namespace

double smoothness(const RewardFamily& family, std::size_t action_size,
                  double lambda) {
  if (std::holds_alternative<LinearReward>(family))
    return static_cast<double>(action_size) * lambda;
  return coverage_mass(std::get<CoverageReward>(family)) * lambda;
}

double inverse_smoothness(const RewardFamily& family, std::size_t action_size,
                          double gap) {
  const double slope = std::holds_alternative<LinearReward>(family)
                           ? static_cast<double>(action_size)
                           : coverage_mass(std::get<CoverageReward>(family));
  if (!(slope > 0.0)) throw DomainError("smoothness slope must be positive");
  return gap / slope;
}

// -- ProblemInstance ---------------------------------------------------------

void ProblemInstance::validate() const {
  const auto m = means.size();
  if (m == 0) throw ValidationError("instance needs at least one arm");
  if (budgets.size() != m)
    throw ValidationError("budgets length does not match number of arms");
  if ((means.array() < 0.0).any() || (means.array() > 1.0).any() ||
      !means.allFinite())
    throw ValidationError("arm means must lie in [0,1]");
  if ((budgets.array() < 0.0).any() || !budgets.allFinite())
    throw ValidationError("budgets must be finite and nonnegative");
  if (action_size < 1 || action_size > static_cast<std::size_t>(m))
    throw ValidationError("action size must lie in [1, m]");
  if (distribution == Distribution::truncated_gaussian && !(noise_sigma > 0.0))
    throw ValidationError("gaussian noise sigma must be positive");
  if (const auto* cov = std::get_if<CoverageReward>(&family)) {
    if (cov->links.rows() != m || cov->links.cols() != cov->weights.size())
      throw ValidationError("coverage links must be arms x targets");
    if ((cov->weights.array() < 0.0).any())
      throw ValidationError("coverage weights must be nonnegative");
    if ((cov->links.array() < 0.0).any() || (cov->links.array() > 1.0).any())
      throw ValidationError("coverage link probabilities must lie in [0,1]");
  }
}

void ProblemInstance::check_subset(std::span<const std::size_t> subset) const {
  if (subset.size() != action_size)
    throw ConstraintError("subset has " + std::to_string(subset.size()) +
                          " arms, action size is " +
                          std::to_string(action_size));
  for (std::size_t n = 0; n < subset.size(); ++n) {
    if (subset[n] >= num_arms())
      throw ConstraintError("subset contains out-of-range arm " +
                            std::to_string(subset[n]));
    if (n > 0 && subset[n] <= subset[n - 1])
      throw ConstraintError("subset must be sorted and duplicate-free");
  }
}

double expected_reward(const ProblemInstance& instance,
                       std::span<const std::size_t> subset) {
  return expected_reward(instance.family, instance.means, subset);
}

double sample_raw_reward(const ProblemInstance& instance, std::size_t arm,
                         Rng& rng) {
  if (arm >= instance.num_arms())
    throw IndexError("arm index " + std::to_string(arm) + " out of range");
  const double mu = instance.means(static_cast<Eigen::Index>(arm));
  switch (instance.distribution) {
    case Distribution::bernoulli:
      return bernoulli(rng, mu) ? 1.0 : 0.0;
    case Distribution::truncated_gaussian:
      return std::clamp(mu + instance.noise_sigma * standard_normal(rng), 0.0,
                        1.0);
  }
  return 0.0;
}

// -- BudgetLedger -----------------------------------------------------------

BudgetLedger::BudgetLedger(Eigen::VectorXd budgets)
    : budgets_(std::move(budgets)), spent_(Eigen::VectorXd::Zero(budgets_.size())) {
  if ((budgets_.array() < 0.0).any())
    throw ValidationError("budgets must be nonnegative");
}

void BudgetLedger::check(std::size_t arm) const {
  if (arm >= num_arms())
    throw IndexError("ledger arm " + std::to_string(arm) + " out of range");
}

double BudgetLedger::budget(std::size_t arm) const {
  check(arm);
  return budgets_(static_cast<Eigen::Index>(arm));
}

double BudgetLedger::spent(std::size_t arm) const {
  check(arm);
  return spent_(static_cast<Eigen::Index>(arm));
}

double BudgetLedger::remaining(std::size_t arm) const {
  check(arm);
  const auto i = static_cast<Eigen::Index>(arm);
  return std::max(0.0, budgets_(i) - spent_(i));
}

double BudgetLedger::debit(std::size_t arm, double amount) {
  const double left = remaining(arm);
  const double z = std::clamp(amount, 0.0, left);
  const auto i = static_cast<Eigen::Index>(arm);
  // Draining the rest sets spent to the budget exactly, so no rounding dust survives.
  if (z == left) spent_(i) = std::max(spent_(i), budgets_(i));
  else spent_(i) += z;
  return z;
}

// -- ArmHistory -------------------------------------------------------------

void ArmHistory::append(const PullRecord& record) {
  if (!pulls_.empty() && record.round <= pulls_.back().round)
    throw ValidationError("arm history is append-only in round order");
  pulls_.push_back(record);
}

bool ArmHistory::pulled_at(std::size_t round) const {
  return std::binary_search(
      pulls_.begin(), pulls_.end(), PullRecord{round, 0.0, 0.0},
      [](const PullRecord& a, const PullRecord& b) { return a.round < b.round; });
}

std::vector<bool> ArmHistory::indicators(std::size_t through_round) const {
  std::vector<bool> out(through_round, false);
  for (const auto& p : pulls_)
    if (p.round >= 1 && p.round <= through_round) out[p.round - 1] = true;
  return out;
}

// -- Strategies -------------------------------------------------------------

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::none: return "none";
    case StrategyKind::lsi: return "lsi";
    case StrategyKind::random: return "random";
    case StrategyKind::pb_lsi: return "pb_lsi";
    case StrategyKind::pd_lsi: return "pd_lsi";
    case StrategyKind::pbd_lsi: return "pbd_lsi";
    case StrategyKind::collusion_plan: return "collusion_plan";
  }
  return "unknown";
}

StrategyKind strategy_from_string(const std::string& name) {
  for (auto k : {StrategyKind::none, StrategyKind::lsi, StrategyKind::random,
                 StrategyKind::pb_lsi, StrategyKind::pd_lsi,
                 StrategyKind::pbd_lsi, StrategyKind::collusion_plan})
    if (to_string(k) == name) return k;
  throw ValidationError("unknown manipulation strategy: " + name);
}

ManipulationStrategy ManipulationStrategy::prioritized(StrategyKind kind,
                                                       double initial,
                                                       std::size_t burst_round) {
  if (kind != StrategyKind::pb_lsi && kind != StrategyKind::pd_lsi &&
      kind != StrategyKind::pbd_lsi)
    throw ValidationError("prioritized strategy needs a pb/pd/pbd kind");
  ManipulationStrategy s;
  s.kind = kind;
  s.initial_spend = std::max(0.0, initial);
  s.burst_round = burst_round;
  return s;
}

ManipulationStrategy ManipulationStrategy::plan(std::vector<double> schedule) {
  ManipulationStrategy s;
  s.kind = StrategyKind::collusion_plan;
  s.schedule = std::move(schedule);
  return s;
}

double compute_manipulation(const ManipulationStrategy& strategy,
                            const ArmHistory& history,
                            const BudgetLedger& ledger, std::size_t arm,
                            std::size_t t, Rng& rng) {
  const double remaining = ledger.remaining(arm);
  const std::size_t prior_pulls = history.pull_count();
  double z = 0.0;
  switch (strategy.kind) {
    case StrategyKind::none:
      break;
    case StrategyKind::lsi:
      z = prior_pulls == 0 ? remaining : 0.0;
      break;
    case StrategyKind::random:
      // Draw even when exhausted so the stream position tracks pull count.
      z = uniform01(rng);
      break;
    case StrategyKind::pb_lsi:
    case StrategyKind::pd_lsi:
    case StrategyKind::pbd_lsi:
      if (prior_pulls == 0)
        z = strategy.initial_spend;
      else if (t >= strategy.burst_round)
        z = remaining;
      break;
    case StrategyKind::collusion_plan:
      if (prior_pulls < strategy.schedule.size())
        z = strategy.schedule[prior_pulls];
      break;
  }
  return std::clamp(z, 0.0, remaining);
}

// -- Environment ------------------------------------------------------------

EnvStreams EnvStreams::from_seed(std::uint64_t seed, std::size_t num_arms) {
  EnvStreams s;
  s.reward.reserve(num_arms);
  s.strategy.reserve(num_arms);
  for (std::size_t i = 0; i < num_arms; ++i) {
    s.reward.push_back(make_stream(seed, "arm-reward", i));
    s.strategy.push_back(make_stream(seed, "arm-strategy", i));
  }
  return s;
}

RoundTrace env_step(const ProblemInstance& instance,
                    std::span<const ManipulationStrategy> strategies,
                    BudgetLedger& ledger, std::vector<ArmHistory>& histories,
                    std::span<const std::size_t> subset, std::size_t t,
                    EnvStreams& streams) {
  instance.check_subset(subset);
  const std::size_t m = instance.num_arms();
  if (strategies.size() != m || histories.size() != m ||
      ledger.num_arms() != m || streams.reward.size() != m ||
      streams.strategy.size() != m)
    throw ShapeError("environment state does not match the number of arms");

  RoundTrace trace;
  trace.round = t;
  trace.subset.assign(subset.begin(), subset.end());
  trace.raw.reserve(subset.size());
  trace.manipulation.reserve(subset.size());
  trace.observed.reserve(subset.size());
  for (std::size_t arm : subset) {
    const double x = sample_raw_reward(instance, arm, streams.reward[arm]);
    const double wanted = compute_manipulation(
        strategies[arm], histories[arm], ledger, arm, t, streams.strategy[arm]);
    const double z = ledger.debit(arm, wanted);
    histories[arm].append({t, x, z});
    trace.raw.push_back(x);
    trace.manipulation.push_back(z);
    trace.observed.push_back(x + z);
  }
  trace.expected_reward = expected_reward(instance, subset);
  return trace;
}

Environment::Environment(ProblemInstance instance,
                         std::vector<ManipulationStrategy> strategies,
                         std::uint64_t seed)
    : instance_(std::move(instance)),
      strategies_(std::move(strategies)),
      ledger_(instance_.budgets),
      histories_(instance_.num_arms()),
      streams_(EnvStreams::from_seed(seed, instance_.num_arms())) {
  instance_.validate();
  if (strategies_.size() != instance_.num_arms())
    throw ShapeError("one manipulation strategy per arm is required");
}

RoundTrace Environment::step(std::span<const std::size_t> subset, std::size_t t) {
  return env_step(instance_, strategies_, ledger_, histories_, subset, t,
                  streams_);
}

}  // namespace scucb
