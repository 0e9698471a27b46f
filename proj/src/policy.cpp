#include "scucb/policy.hpp"

#include <algorithm>
#include <cmath>

namespace scucb {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::scucb: return "scucb";
    case PolicyKind::cucb: return "cucb";
    case PolicyKind::tscb: return "tscb";
    case PolicyKind::exp3cb: return "exp3cb";
    case PolicyKind::ucb_eta: return "ucb_eta";
  }
  return "unknown";
}

PolicyKind policy_from_string(const std::string& name) {
  for (auto k : {PolicyKind::scucb, PolicyKind::cucb, PolicyKind::tscb,
                 PolicyKind::exp3cb, PolicyKind::ucb_eta})
    if (to_string(k) == name) return k;
  throw ValidationError("unknown policy: " + name);
}

// Log-weights are kept within this distance of the largest so that every
// weight stays a positive normal double.
constexpr double kLogWeightFloor = 700.0;

PolicyState::PolicyState(PolicyKind kind, std::size_t num_arms, PolicyParams params)
    : kind_(kind),
      params_(params),
      counts_(CountVector::Zero(static_cast<Eigen::Index>(num_arms))),
      sums_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_arms))),
      beta_a_(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(num_arms))),
      beta_b_(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(num_arms))),
      log_weights_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_arms))),
      inclusion_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_arms))) {
  if (num_arms == 0) throw ValidationError("policy needs at least one arm");
  if (!(params_.gamma >= 0.0 && params_.gamma <= 1.0))
    throw ValidationError("gamma must lie in [0,1]");
  if (!(params_.learner_max_budget >= 0.0))
    throw ValidationError("learner B_max must be nonnegative");
  if (!(params_.eta > 0.0 && params_.eta < 1.0))
    throw ValidationError("eta must lie in (0,1)");
  if (!(params_.exp3_exploration >= 0.0 && params_.exp3_exploration <= 1.0))
    throw ValidationError("exp3 exploration must lie in [0,1]");
  if (params_.exp3_mc_samples == 0)
    throw ValidationError("exp3 needs at least one Monte Carlo sample");
}

Eigen::VectorXd PolicyState::means() const {
  Eigen::VectorXd out(sums_.size());
  for (Eigen::Index i = 0; i < sums_.size(); ++i)
    out(i) = counts_(i) > 0 ? sums_(i) / static_cast<double>(counts_(i)) : 0.0;
  return out;
}

double PolicyState::mean(std::size_t arm) const {
  const auto i = static_cast<Eigen::Index>(arm);
  if (i >= counts_.size()) throw IndexError("policy arm out of range");
  return counts_(i) > 0 ? sums_(i) / static_cast<double>(counts_(i)) : 0.0;
}

void PolicyState::set_posterior(std::size_t arm, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw ValidationError("Beta parameters must be > 0");
  beta_a_(static_cast<Eigen::Index>(arm)) = a;
  beta_b_(static_cast<Eigen::Index>(arm)) = b;
}

Eigen::VectorXd PolicyState::weights() const {
  return (log_weights_.array() - log_weights_.maxCoeff()).exp().matrix();
}

void PolicyState::set_log_weights(Eigen::VectorXd log_weights) {
  if (log_weights.size() != log_weights_.size())
    throw ShapeError("log-weight vector has the wrong length");
  log_weights_ = std::move(log_weights);
}

double PolicyState::exp3_rate() const {
  if (params_.exp3_learning_rate > 0.0) return params_.exp3_learning_rate;
  const double m = static_cast<double>(num_arms());
  const double horizon = params_.horizon > 0 ? static_cast<double>(params_.horizon) : 1e4;
  return std::sqrt(2.0 * std::log(std::max(m, 2.0)) / (m * horizon));
}

Eigen::VectorXd PolicyState::exp3_distribution() const {
  const Eigen::VectorXd w = weights();
  const double mix = params_.exp3_exploration;
  const double m = static_cast<double>(num_arms());
  return ((1.0 - mix) * w / w.sum()).array() + mix / m;
}

Eigen::VectorXd ucb_indices(const PolicyState& state, std::size_t t,
                            double max_budget, double gamma) {
  const auto& k = state.counts();
  if ((k.array() < 1).any())
    throw DomainError("ucb indices need every arm pulled at least once");
  const Eigen::ArrayXd pulls = k.cast<double>().array();
  const double log_t = std::log(static_cast<double>(t));
  return (state.means().array() + gamma * (3.0 * log_t / (2.0 * pulls)).sqrt() +
          max_budget / pulls)
      .matrix();
}

double eta_ucb_index(double mean, std::int64_t pulls, double eta) {
  if (pulls < 1) throw DomainError("eta_ucb_index requires at least one pull");
  const double k = static_cast<double>(pulls);
  return mean + std::sqrt(2.0 * std::log(k * k / (eta * eta)) / k);
}

Subset initialization_subset(std::size_t t, std::size_t m, std::size_t k) {
  if (t < 1 || t > m) throw IndexError("initialization round must lie in [1, m]");
  if (k < 1 || k > m) throw ConstraintError("action size must lie in [1, m]");
  Subset s{t - 1};
  for (std::size_t i = 0; s.size() < k; ++i)
    if (i != t - 1) s.push_back(i);
  std::sort(s.begin(), s.end());
  return s;
}

namespace {

// Draws k distinct arms by sequential sampling without replacement.
Subset draw_without_replacement(const Eigen::VectorXd& probs, std::size_t k,
                                Rng& rng) {
  const auto m = static_cast<std::size_t>(probs.size());
  std::vector<double> p(probs.data(), probs.data() + m);
  Subset out;
  out.reserve(k);
  for (std::size_t step = 0; step < k; ++step) {
    double total = 0.0;
    for (double v : p) total += v;
    double u = uniform01(rng) * total;
    std::size_t pick = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (p[i] <= 0.0) continue;
      pick = i;
      if (u < p[i]) break;
      u -= p[i];
    }
    p[pick] = 0.0;
    out.push_back(pick);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

PolicyDecision policy_select(PolicyState& state, std::size_t t,
                             const OracleSpec& oracle, const InstanceShape& shape,
                             Rng& rng, Rng& oracle_rng) {
  const std::size_t m = state.num_arms();
  if (shape.num_arms != m) throw ShapeError("policy/instance arm count mismatch");
  if (t <= m) throw DomainError("policy_select is for rounds after initialization");
  const auto& params = state.params();

  auto ask_oracle = [&](const Eigen::VectorXd& scores) {
    const auto r = oracle_select(oracle, scores, shape, oracle_rng);
    return PolicyDecision{r.subset, r.failed};
  };

  switch (state.kind()) {
    case PolicyKind::scucb:
      return ask_oracle(ucb_indices(state, t, params.learner_max_budget, params.gamma));
    case PolicyKind::cucb:
      return ask_oracle(ucb_indices(state, t, 0.0, params.gamma));
    case PolicyKind::ucb_eta: {
      Eigen::VectorXd scores(static_cast<Eigen::Index>(m));
      for (std::size_t i = 0; i < m; ++i)
        scores(static_cast<Eigen::Index>(i)) = eta_ucb_index(
            state.mean(i), state.counts()(static_cast<Eigen::Index>(i)), params.eta);
      return ask_oracle(scores);
    }
    case PolicyKind::tscb: {
      Eigen::VectorXd samples(static_cast<Eigen::Index>(m));
      for (Eigen::Index i = 0; i < samples.size(); ++i)
        samples(i) = beta_sample(rng, state.beta_a_(i), state.beta_b_(i));
      return ask_oracle(samples);
    }
    case PolicyKind::exp3cb: {
      const Eigen::VectorXd probs = state.exp3_distribution();
      const std::size_t k = shape.action_size;
      PolicyDecision decision{draw_without_replacement(probs, k, rng), false};
      // Inclusion probabilities of the without-replacement scheme by Monte
      // Carlo; the realised draw counts as one sample so played arms never
      // get a zero estimate.
      Eigen::VectorXd hits = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
      for (std::size_t i : decision.subset) hits(static_cast<Eigen::Index>(i)) += 1.0;
      for (std::size_t n = 0; n < params.exp3_mc_samples; ++n)
        for (std::size_t i : draw_without_replacement(probs, k, rng))
          hits(static_cast<Eigen::Index>(i)) += 1.0;
      state.inclusion_ = hits / static_cast<double>(params.exp3_mc_samples + 1);
      return decision;
    }
  }
  return {};
}

void policy_update(PolicyState& state, std::span<const std::size_t> subset,
                   std::span<const double> observed, std::size_t /*t*/, Rng& rng) {
  if (subset.size() != observed.size())
    throw ShapeError("expected one observed signal per played arm");
  for (std::size_t i : subset)
    if (i >= state.num_arms()) throw IndexError("played arm out of range");

  for (std::size_t n = 0; n < subset.size(); ++n) {
    const auto i = static_cast<Eigen::Index>(subset[n]);
    state.counts_(i) += 1;
    state.sums_(i) += observed[n];
  }

  switch (state.kind()) {
    case PolicyKind::tscb:
      for (std::size_t n = 0; n < subset.size(); ++n) {
        const auto i = static_cast<Eigen::Index>(subset[n]);
        const double p = std::clamp(observed[n], 0.0, 1.0);
        if (bernoulli(rng, p))
          state.beta_a_(i) += 1.0;
        else
          state.beta_b_(i) += 1.0;
      }
      break;
    case PolicyKind::exp3cb: {
      // Initialization rounds happen before any EXP3 draw; they only seed
      // the counters.
      if (state.inclusion_.sum() <= 0.0) break;
      const double rate = state.exp3_rate();
      for (std::size_t n = 0; n < subset.size(); ++n) {
        const auto i = static_cast<Eigen::Index>(subset[n]);
        const double loss = 1.0 - std::clamp(observed[n], 0.0, 1.0);
        state.log_weights_(i) -= rate * loss / state.inclusion_(i);
      }
      const double top = state.log_weights_.maxCoeff();
      state.log_weights_ = state.log_weights_.cwiseMax(top - kLogWeightFloor);
      break;
    }
    default:
      break;
  }
}

PolicyState& initialize(PolicyState& state, const InstanceShape& shape,
                        const EnvCallback& env, Rng& rng) {
  const std::size_t m = state.num_arms();
  if (shape.num_arms != m) throw ShapeError("policy/instance arm count mismatch");
  if ((state.counts().array() != 0).any())
    throw ValidationError("initialize expects a fresh policy state");
  for (std::size_t t = 1; t <= m; ++t) {
    const Subset s = initialization_subset(t, m, shape.action_size);
    const std::vector<double> observed = env(s, t);
    policy_update(state, s, observed, t, rng);
  }
  return state;
}

}  // namespace scucb
