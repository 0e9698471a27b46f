#include "scucb/oracle.hpp"

#include "scucb/subsets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace scucb {

namespace {

void check_unit_interval(double v, const char* what) {
  if (!(v > 0.0 && v <= 1.0))
    throw ValidationError(std::string(what) + " must lie in (0,1]");
}

}  // namespace

OracleSpec OracleSpec::exact_topk() {
  OracleSpec s;
  s.kind_ = OracleKind::exact_topk;
  return s;
}

OracleSpec OracleSpec::greedy_coverage() {
  OracleSpec s;
  s.kind_ = OracleKind::greedy_coverage;
  s.alpha_ = 1.0 - 1.0 / std::exp(1.0);
  return s;
}

OracleSpec OracleSpec::failing(const OracleSpec& inner, double beta) {
  check_unit_interval(beta, "oracle beta");
  OracleSpec s;
  s.kind_ = OracleKind::failing_wrapper;
  s.alpha_ = inner.alpha_;
  s.beta_ = inner.beta_ * beta;
  s.layer_beta_ = beta;
  s.inner_ = std::make_shared<const OracleSpec>(inner);
  return s;
}

std::string OracleSpec::describe() const {
  switch (kind_) {
    case OracleKind::exact_topk: return "exact_topk";
    case OracleKind::greedy_coverage: return "greedy_coverage";
    case OracleKind::failing_wrapper:
      return "failing_wrapper(" + inner_->describe() + "," +
             std::to_string(layer_beta_) + ")";
  }
  return "unknown";
}

Subset top_k(const Eigen::VectorXd& values, std::size_t k) {
  const auto m = static_cast<std::size_t>(values.size());
  if (k > m) throw ConstraintError("top_k: k exceeds number of arms");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      const double va = values(static_cast<Eigen::Index>(a));
                      const double vb = values(static_cast<Eigen::Index>(b));
                      return va > vb || (va == vb && a < b);
                    });
  Subset out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

Subset greedy_select(const Eigen::VectorXd& estimates, const InstanceShape& shape) {
  Subset chosen;
  chosen.reserve(shape.action_size);
  std::vector<bool> taken(shape.num_arms, false);
  for (std::size_t step = 0; step < shape.action_size; ++step) {
    std::size_t best = shape.num_arms;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < shape.num_arms; ++i) {
      if (taken[i]) continue;
      Subset trial = chosen;
      trial.insert(std::upper_bound(trial.begin(), trial.end(), i), i);
      const double v = expected_reward(shape.family, estimates, trial);
      // Strict comparison keeps the lowest index on ties.
      if (v > best_value) {
        best_value = v;
        best = i;
      }
    }
    taken[best] = true;
    chosen.insert(std::upper_bound(chosen.begin(), chosen.end(), best), best);
  }
  return chosen;
}

Subset uniform_subset(std::size_t m, std::size_t k, Rng& rng) {
  if (k > m) throw ConstraintError("uniform_subset: k exceeds m");
  std::vector<std::size_t> pool(m);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_index(rng, m - i));
    std::swap(pool[i], pool[j]);
  }
  Subset out(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

OracleResult oracle_select(const OracleSpec& spec,
                           const Eigen::VectorXd& estimates,
                           const InstanceShape& shape, Rng& rng) {
  if (static_cast<std::size_t>(estimates.size()) != shape.num_arms)
    throw ShapeError("estimate vector length " +
                     std::to_string(estimates.size()) + " does not match m=" +
                     std::to_string(shape.num_arms));
  if (shape.action_size < 1 || shape.action_size > shape.num_arms)
    throw ConstraintError("action size must lie in [1, m]");
  switch (spec.kind()) {
    case OracleKind::exact_topk:
      return {top_k(estimates, shape.action_size), false};
    case OracleKind::greedy_coverage:
      return {greedy_select(estimates, shape), false};
    case OracleKind::failing_wrapper: {
      const bool succeed = uniform01(rng) < spec.failure_layer_beta();
      OracleResult inner = oracle_select(*spec.inner(), estimates, shape, rng);
      if (succeed) return inner;
      return {uniform_subset(shape.num_arms, shape.action_size, rng), true};
    }
  }
  return {};
}

double oracle_guarantee_check(const OracleSpec& spec,
                              const Eigen::VectorXd& estimates,
                              const InstanceShape& shape, std::size_t trials,
                              Rng& rng) {
  if (shape.num_arms > 15)
    throw CapabilityError("guarantee check enumerates subsets; needs m <= 15");
  if (trials == 0) throw ValidationError("guarantee check needs trials > 0");
  double opt = -std::numeric_limits<double>::infinity();
  for_each_subset(shape.num_arms, shape.action_size, [&](const Subset& s) {
    opt = std::max(opt, expected_reward(shape.family, estimates, s));
  });
  const double target = spec.alpha() * opt;
  std::size_t hits = 0;
  for (std::size_t n = 0; n < trials; ++n) {
    const auto result = oracle_select(spec, estimates, shape, rng);
    const double value = expected_reward(shape.family, estimates, result.subset);
    // Relative slack absorbs rounding differences between summation orders.
    if (value >= target - 1e-12 * std::max(1.0, std::abs(target))) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace scucb
