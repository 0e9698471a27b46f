#include "scucb/harness.hpp"

#include "scucb/collusion.hpp"
#include "scucb/oracle.hpp"
#include "scucb/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace scucb {

using nlohmann::json;

// -- Instance construction ----------------------------------------------------

ProblemInstance generate_instance(const ExperimentConfig& config, std::uint64_t seed) {
  const std::size_t m = config.num_arms;
  const auto rows = static_cast<Eigen::Index>(m);
  Rng rng = make_stream(seed, "instance");

  ProblemInstance inst;
  inst.action_size = config.action_size;
  inst.distribution = config.distribution;
  inst.noise_sigma = config.noise_sigma;

  inst.means.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double u = uniform01(rng);
    inst.means(i) = config.means_rule == MeansRule::list
                        ? config.means[static_cast<std::size_t>(i)]
                        : u;
  }

  if (config.reward_family == "coverage") {
    const auto targets = static_cast<Eigen::Index>(config.coverage_targets);
    CoverageReward cov;
    cov.weights = Eigen::VectorXd::Ones(targets);
    cov.links.resize(rows, targets);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < targets; ++j) cov.links(i, j) = uniform01(rng);
    inst.family = std::move(cov);
  }

  inst.budgets.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double u = uniform01(rng);
    switch (config.budget_rule) {
      case BudgetRule::uniform_random: inst.budgets(i) = u * config.max_budget; break;
      case BudgetRule::fixed: inst.budgets(i) = config.max_budget; break;
      case BudgetRule::list: inst.budgets(i) = config.budgets[static_cast<std::size_t>(i)]; break;
    }
  }

  inst.validate();
  const auto [optimal, opt] = optimal_subset(inst);
  for (std::size_t i : optimal) inst.budgets(static_cast<Eigen::Index>(i)) = 0.0;
  return inst;
}

Eigen::VectorXd strategic_gaps(const ProblemInstance& instance, const Subset& optimal) {
  double weakest = std::numeric_limits<double>::infinity();
  for (std::size_t i : optimal) weakest = std::min(weakest, instance.means(static_cast<Eigen::Index>(i)));
  return (weakest - instance.means.array()).cwiseMax(0.0).matrix();
}

std::vector<ManipulationStrategy> build_strategies(const ExperimentConfig& config,
                                                   const ProblemInstance& instance,
                                                   const Subset& optimal) {
  const std::size_t m = instance.num_arms();
  switch (config.strategy) {
    case StrategyKind::none:
    case StrategyKind::lsi:
    case StrategyKind::random: {
      ManipulationStrategy s;
      s.kind = config.strategy;
      return std::vector<ManipulationStrategy>(m, s);
    }
    case StrategyKind::pb_lsi:
    case StrategyKind::pd_lsi:
    case StrategyKind::pbd_lsi: {
      const LsiVariant variant = config.strategy == StrategyKind::pb_lsi   ? LsiVariant::pb
                                 : config.strategy == StrategyKind::pd_lsi ? LsiVariant::pd
                                                                           : LsiVariant::pbd;
      return lsi_variant_strategies(variant, instance.budgets,
                                    strategic_gaps(instance, optimal));
    }
    case StrategyKind::collusion_plan: {
      CollusionProgram program;
      program.budgets = instance.budgets;
      program.gaps = strategic_gaps(instance, optimal);
      program.horizon = static_cast<std::int64_t>(config.horizon);
      program.objective = config.collusion_unit_weights ? CollusionObjective::unit
                                                        : CollusionObjective::gap_weighted;
      const auto solution = solve_collusion_bruteforce(program, config.collusion_y_cap);
      return plan_to_strategy(program, solution);
    }
  }
  return std::vector<ManipulationStrategy>(m);
}

// -- Single replication -------------------------------------------------------

RunResult run_single(const ExperimentConfig& config, PolicyKind policy,
                     std::uint64_t seed, const RunOptions& options) {
  config.validate();
  ProblemInstance instance = generate_instance(config, seed);
  auto [optimal, opt] = optimal_subset(instance);
  const std::size_t m = instance.num_arms();
  const std::size_t horizon = config.horizon;
  const OracleSpec oracle = config.oracle_spec();
  const InstanceShape shape = InstanceShape::of(instance);

  Environment env(instance, build_strategies(config, instance, optimal), seed);
  Rng policy_rng = make_stream(seed, "policy");
  Rng oracle_rng = make_stream(seed, "oracle");

  RunResult result{.policy = policy,
                   .seed = seed,
                   .instance = instance,
                   .optimal = optimal,
                   .opt = opt,
                   .alpha = oracle.alpha(),
                   .beta = oracle.beta(),
                   .regret = {},
                   .cumulative_reward = {},
                   .rounds = {},
                   .lemma1_violation = {},
                   .suboptimal_counters = {},
                   .oracle_failures = 0,
                   .final_state = PolicyState(policy, m, config.policy_params()),
                   .final_ledger = {}};
  PolicyState& state = result.final_state;
  result.regret.init_rounds = m;
  result.regret.subsets.reserve(horizon);
  result.regret.rewards.reserve(horizon);
  result.regret.cumulative_regret.reserve(horizon);
  result.cumulative_reward.reserve(horizon);
  result.lemma1_violation.assign(horizon, 0);

  const double benchmark = result.alpha * result.beta * opt;
  double cum_regret = 0.0;
  double cum_reward = 0.0;
  auto record = [&](RoundTrace&& trace) {
    cum_regret += benchmark - trace.expected_reward;
    cum_reward += trace.expected_reward;
    result.regret.subsets.push_back(trace.subset);
    result.regret.rewards.push_back(trace.expected_reward);
    result.regret.cumulative_regret.push_back(cum_regret);
    result.cumulative_reward.push_back(cum_reward);
    std::vector<double> observed = trace.observed;
    if (options.keep_rounds) result.rounds.push_back(std::move(trace));
    return observed;
  };

  initialize(state, shape,
             [&](const Subset& s, std::size_t t) { return record(env.step(s, t)); },
             policy_rng);

  for (std::size_t t = m + 1; t <= horizon; ++t) {
    const auto snap = lemma1_monitor(instance.means, state, env.ledger(), t);
    result.lemma1_violation[t - 1] = snap.event_holds ? 0 : 1;
    const auto decision = policy_select(state, t, oracle, shape, policy_rng, oracle_rng);
    if (decision.oracle_failed) ++result.oracle_failures;
    const auto observed = record(env.step(decision.subset, t));
    policy_update(state, decision.subset, observed, t, policy_rng);
  }

  result.suboptimal_counters =
      suboptimal_pull_counters(result.regret, result.alpha * opt, m);
  result.final_ledger = env.ledger();
  return result;
}

// -- Sweeps -------------------------------------------------------------------

const CellSummary& RunSummary::cell(const std::string& label, PolicyKind policy) const {
  for (const auto& c : cells)
    if (c.cell == label && c.policy == policy) return c;
  throw IndexError("no cell " + label + " for policy " + to_string(policy));
}

std::string cell_label(const json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

namespace {

struct JobOutput {
  double final_regret = 0.0;
  double final_reward = 0.0;
  std::vector<double> cum_regret;
  std::vector<double> cum_reward;
  std::vector<char> violations;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

RunSummary run_sweep(const ExperimentConfig& config, const SweepAxis& axis) {
  config.validate();
  std::vector<std::string> labels;
  std::vector<ExperimentConfig> cell_configs;
  if (axis.field.empty()) {
    labels.push_back("base");
    cell_configs.push_back(config);
  } else {
    if (axis.values.empty()) throw ValidationError("sweep axis has no values");
    for (const auto& v : axis.values) {
      json doc = to_json(config);
      if (!doc.contains(axis.field))
        throw ValidationError("unknown sweep axis: " + axis.field);
      doc[axis.field] = v;
      cell_configs.push_back(config_from_json(doc));
      labels.push_back(cell_label(v));
    }
  }

  struct Job {
    std::size_t cell, policy, seed;
  };
  std::vector<Job> jobs;
  std::vector<std::vector<PolicyKind>> cell_policies;
  for (std::size_t c = 0; c < cell_configs.size(); ++c) {
    cell_policies.push_back(cell_configs[c].policies);
    for (std::size_t p = 0; p < cell_policies[c].size(); ++p)
      for (std::size_t s = 0; s < config.seeds.size(); ++s) jobs.push_back({c, p, s});
  }

  std::vector<JobOutput> outputs(jobs.size());
  parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
    const Job& job = jobs[j];
    const auto& cfg = cell_configs[job.cell];
    RunResult r = run_single(cfg, cell_policies[job.cell][job.policy], config.seeds[job.seed]);
    JobOutput& out = outputs[j];
    out.final_regret = r.final_regret();
    out.final_reward = r.cumulative_reward.back();
    out.cum_regret = std::move(r.regret.cumulative_regret);
    out.cum_reward = std::move(r.cumulative_reward);
    out.violations = std::move(r.lemma1_violation);
  });

  RunSummary summary;
  summary.config = to_json(config);
  summary.config_hash = config_hash(config);
  summary.axis = axis.field;
  summary.seeds = config.seeds;
  summary.record_stride = config.effective_stride();

  std::size_t j = 0;
  for (std::size_t c = 0; c < cell_configs.size(); ++c) {
    const std::size_t horizon = cell_configs[c].horizon;
    const std::size_t stride = cell_configs[c].effective_stride();
    for (std::size_t p = 0; p < cell_policies[c].size(); ++p) {
      CellSummary cell;
      cell.cell = labels[c];
      cell.policy = cell_policies[c][p];
      cell.seeds = config.seeds;
      cell.mean_regret_curve.assign(horizon, 0.0);
      cell.lemma1_violation_rate.assign(horizon, 0.0);
      for (std::size_t s = 0; s < config.seeds.size(); ++s, ++j) {
        const JobOutput& out = outputs[j];
        cell.final_regrets.push_back(out.final_regret);
        cell.final_rewards.push_back(out.final_reward);
        for (std::size_t t = 0; t < horizon; ++t) {
          cell.mean_regret_curve[t] += out.cum_regret[t];
          cell.lemma1_violation_rate[t] += out.violations[t];
        }
        SeedSeries series{config.seeds[s], {}};
        for (std::size_t t = stride; t <= horizon; t += stride)
          series.rows.push_back({t, out.cum_regret[t - 1], out.cum_reward[t - 1]});
        cell.series.push_back(std::move(series));
      }
      const double n = static_cast<double>(config.seeds.size());
      for (std::size_t t = 0; t < horizon; ++t) {
        cell.mean_regret_curve[t] /= n;
        cell.lemma1_violation_rate[t] /= n;
      }
      cell.mean_final_regret = mean_of(cell.final_regrets);
      cell.std_final_regret = sample_std(cell.final_regrets);
      cell.mean_final_reward = mean_of(cell.final_rewards);
      cell.std_final_reward = sample_std(cell.final_rewards);
      summary.cells.push_back(std::move(cell));
    }
  }
  return summary;
}

RunSummary run_experiment(const ExperimentConfig& config) {
  return run_sweep(config, SweepAxis{});
}

// -- Output -------------------------------------------------------------------

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_csv(const RunSummary& summary, std::ostream& out) {
  out << "policy,cell,seed,t,cum_regret,cum_reward\n";
  for (const auto& cell : summary.cells)
    for (const auto& series : cell.series)
      for (const auto& row : series.rows)
        out << to_string(cell.policy) << ',' << cell.cell << ',' << series.seed << ','
            << row.t << ',' << format_double(row.cum_regret) << ','
            << format_double(row.cum_reward) << '\n';
}

std::string to_csv(const RunSummary& summary) {
  std::ostringstream out;
  write_csv(summary, out);
  return out.str();
}

json environment_fingerprint() {
  json env;
#if defined(__clang__)
  env["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  env["compiler"] = std::string("gcc ") + __VERSION__;
#else
  env["compiler"] = "unknown";
#endif
  env["cplusplus"] = __cplusplus;
  env["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
#if defined(__linux__)
  env["platform"] = "linux";
#elif defined(__APPLE__)
  env["platform"] = "darwin";
#else
  env["platform"] = "other";
#endif
#ifdef NDEBUG
  env["assertions"] = false;
#else
  env["assertions"] = true;
#endif
  return env;
}

json summary_to_json(const RunSummary& summary) {
  json cells = json::array();
  for (const auto& c : summary.cells) {
    cells.push_back({
        {"cell", c.cell},
        {"policy", to_string(c.policy)},
        {"seeds", c.seeds},
        {"final_regrets", c.final_regrets},
        {"final_rewards", c.final_rewards},
        {"mean_final_regret", c.mean_final_regret},
        {"std_final_regret", c.std_final_regret},
        {"mean_final_reward", c.mean_final_reward},
        {"std_final_reward", c.std_final_reward},
        {"mean_regret_curve", c.mean_regret_curve},
        {"lemma1_violation_rate", c.lemma1_violation_rate},
    });
  }
  return {
      {"config", summary.config},
      {"config_hash", summary.config_hash},
      {"axis", summary.axis},
      {"seeds", summary.seeds},
      {"record_stride", summary.record_stride},
      {"environment", environment_fingerprint()},
      {"cells", cells},
  };
}

RunSummary summary_from_json(const json& doc) {
  RunSummary s;
  try {
    s.config = doc.at("config");
    s.config_hash = doc.at("config_hash").get<std::string>();
    s.axis = doc.at("axis").get<std::string>();
    doc.at("seeds").get_to(s.seeds);
    s.record_stride = doc.at("record_stride").get<std::size_t>();
    for (const auto& c : doc.at("cells")) {
      CellSummary cell;
      cell.cell = c.at("cell").get<std::string>();
      cell.policy = policy_from_string(c.at("policy").get<std::string>());
      c.at("seeds").get_to(cell.seeds);
      c.at("final_regrets").get_to(cell.final_regrets);
      c.at("final_rewards").get_to(cell.final_rewards);
      cell.mean_final_regret = c.at("mean_final_regret").get<double>();
      cell.std_final_regret = c.at("std_final_regret").get<double>();
      cell.mean_final_reward = c.at("mean_final_reward").get<double>();
      cell.std_final_reward = c.at("std_final_reward").get<double>();
      c.at("mean_regret_curve").get_to(cell.mean_regret_curve);
      c.at("lemma1_violation_rate").get_to(cell.lemma1_violation_rate);
      s.cells.push_back(std::move(cell));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed summary document: ") + e.what());
  }
  return s;
}

void emit_results(const RunSummary& summary, OutputFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file: " + path);
  if (format == OutputFormat::csv)
    write_csv(summary, out);
  else
    out << summary_to_json(summary).dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("failed writing output file: " + path);
}

std::string default_output_dir() {
  const char* dir = std::getenv("SCUCB_OUTPUT_DIR");
  return dir && *dir ? std::string(dir) : std::string(".");
}

// -- Studies ------------------------------------------------------------------

std::vector<Lemma1Checkpoint> verify_lemma1(const ExperimentConfig& config,
                                            PolicyKind policy,
                                            const std::vector<std::size_t>& checkpoints) {
  config.validate();
  for (std::size_t t : checkpoints)
    if (t <= config.num_arms || t > config.horizon)
      throw ValidationError("checkpoints must lie in (m, T]");

  std::vector<std::vector<char>> flags(config.seeds.size());
  parallel_for(config.seeds.size(), config.threads, [&](std::size_t s) {
    flags[s] = run_single(config, policy, config.seeds[s]).lemma1_violation;
  });

  std::vector<Lemma1Checkpoint> out;
  const double n = static_cast<double>(config.seeds.size());
  for (std::size_t t : checkpoints) {
    Lemma1Checkpoint cp;
    cp.t = t;
    cp.trials = config.seeds.size();
    for (const auto& f : flags) cp.failures += f[t - 1] ? 1 : 0;
    cp.frequency = static_cast<double>(cp.failures) / n;
    cp.bound = std::min(1.0, lemma1_failure_bound(config.num_arms, t));
    cp.tolerance = 3.0 * std::sqrt(cp.bound * (1.0 - cp.bound) / n);
    cp.pass = cp.frequency <= cp.bound + cp.tolerance;
    out.push_back(cp);
  }
  return out;
}

LinearFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ShapeError("fit_line needs two equally long vectors of length >= 2");
  const double mx = x.mean();
  const double my = y.mean();
  const Eigen::ArrayXd dx = x.array() - mx;
  const Eigen::ArrayXd dy = y.array() - my;
  const double sxx = (dx * dx).sum();
  if (!(sxx > 0.0)) throw DomainError("fit_line needs non-constant x");
  LinearFit fit;
  fit.slope = (dx * dy).sum() / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_tot = (dy * dy).sum();
  const double ss_res =
      ((y.array() - (fit.intercept + fit.slope * x.array())).square()).sum();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace scucb
