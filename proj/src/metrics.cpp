#include "scucb/metrics.hpp"

#include "scucb/oracle.hpp"
#include "scucb/subsets.hpp"

#include <algorithm>
#include <limits>

namespace scucb {

GapReport compute_opt_and_gaps(const ProblemInstance& instance, double alpha) {
  instance.validate();
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in (0,1]");
  const std::size_t m = instance.num_arms();
  const std::size_t k = instance.action_size;
  if (m > 20 || binomial(m, k) > kMaxEnumeratedSubsets)
    throw CapabilityError("gap report enumerates all k-subsets; instance too large");

  std::vector<std::pair<Subset, double>> all;
  all.reserve(binomial(m, k));
  for_each_subset(m, k, [&](const Subset& s) {
    all.emplace_back(s, expected_reward(instance, s));
  });

  GapReport report;
  report.alpha = alpha;
  report.opt = -std::numeric_limits<double>::infinity();
  for (const auto& [s, r] : all)
    if (r > report.opt) {
      report.opt = r;
      report.optimal = s;
    }
  report.threshold = alpha * report.opt;

  std::vector<double> best(m, -std::numeric_limits<double>::infinity());
  std::vector<double> worst(m, std::numeric_limits<double>::infinity());
  for (const auto& [s, r] : all) {
    if (!report.is_suboptimal_reward(r)) continue;
    report.suboptimal.push_back(s);
    for (std::size_t i : s) {
      best[i] = std::max(best[i], r);
      worst[i] = std::min(worst[i], r);
    }
  }

  report.arm_gap_min.resize(m);
  report.arm_gap_max.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (best[i] == -std::numeric_limits<double>::infinity()) continue;
    report.arm_gap_min[i] = report.threshold - best[i];
    report.arm_gap_max[i] = report.threshold - worst[i];
    report.gap_min = std::min(report.gap_min.value_or(*report.arm_gap_min[i]),
                              *report.arm_gap_min[i]);
    report.gap_max = std::max(report.gap_max.value_or(*report.arm_gap_max[i]),
                              *report.arm_gap_max[i]);
  }
  return report;
}

std::pair<Subset, double> optimal_subset(const ProblemInstance& instance) {
  if (std::holds_alternative<LinearReward>(instance.family)) {
    Subset s = top_k(instance.means, instance.action_size);
    return {s, expected_reward(instance, s)};
  }
  const auto report = compute_opt_and_gaps(instance, 1.0);
  return {report.optimal, report.opt};
}

double regret_of_trace(std::span<const double> rewards, double opt, double alpha,
                       double beta, std::size_t horizon) {
  if (rewards.size() < horizon)
    throw ShapeError("trace shorter than the requested horizon");
  double collected = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) collected += rewards[t];
  return static_cast<double>(horizon) * alpha * beta * opt - collected;
}

Lemma1Snapshot lemma1_monitor(const Eigen::VectorXd& true_means,
                              const PolicyState& state,
                              const BudgetLedger& ledger, std::size_t t) {
  const std::size_t m = state.num_arms();
  if (static_cast<std::size_t>(true_means.size()) != m || ledger.num_arms() != m)
    throw ShapeError("lemma1_monitor inputs disagree on the number of arms");
  if (t <= m) throw DomainError("lemma1_monitor applies to rounds after initialization");
  const auto& counts = state.counts();
  if ((counts.array() < 1).any()) throw DomainError("every arm must have been pulled");

  const Eigen::ArrayXd pulls = counts.cast<double>().array();
  const double log_t = std::log(static_cast<double>(t));
  Lemma1Snapshot snap;
  snap.radius = ((3.0 * log_t / (2.0 * pulls)).sqrt() + ledger.spent().array() / pulls)
                    .matrix();
  snap.deviation = (state.means() - true_means).cwiseAbs();
  snap.within.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    snap.within[i] = snap.deviation(r) <= snap.radius(r);
    snap.event_holds = snap.event_holds && snap.within[i];
  }
  return snap;
}

double theorem2_budget_check(double delta, std::int64_t pulls, double eta) {
  if (pulls < 1) throw DomainError("theorem2_budget_check needs K >= 1");
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0,1)");
  const double k = static_cast<double>(pulls);
  const double radius = std::sqrt(2.0 * std::log(k * k / (eta * eta)) / k);
  return std::max(0.0, (delta - radius) * k);
}

std::vector<std::int64_t> suboptimal_pull_counters(const RegretTrace& trace,
                                                   double threshold,
                                                   std::size_t num_arms) {
  if (trace.subsets.size() != trace.rewards.size())
    throw ShapeError("trace subsets and rewards differ in length");
  std::vector<std::int64_t> counters(num_arms, 1);
  for (std::size_t n = trace.init_rounds; n < trace.subsets.size(); ++n) {
    if (!(trace.rewards[n] < threshold)) continue;
    const Subset& s = trace.subsets[n];
    if (s.empty()) continue;
    std::size_t pick = s.front();
    for (std::size_t i : s)
      if (counters.at(i) < counters[pick]) pick = i;
    ++counters[pick];
  }
  return counters;
}

std::vector<std::int64_t> suboptimal_pull_counters(const RegretTrace& trace,
                                                   const GapReport& gaps,
                                                   std::size_t num_arms) {
  return suboptimal_pull_counters(trace, gaps.threshold, num_arms);
}

}  // namespace scucb
