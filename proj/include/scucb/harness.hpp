#pragma once

#include "scucb/config.hpp"
#include "scucb/env.hpp"
#include "scucb/metrics.hpp"
#include "scucb/policy.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace scucb {

/// Draws the instance for one replication from the "instance" stream of
/// `seed`, then zeroes the budgets of the optimal subset.
ProblemInstance generate_instance(const ExperimentConfig& config, std::uint64_t seed);

/// delta_i = max(0, min_{j in S*} mu_j - mu_i): how far an arm trails the
/// weakest member of the optimal subset.
Eigen::VectorXd strategic_gaps(const ProblemInstance& instance, const Subset& optimal);

std::vector<ManipulationStrategy> build_strategies(const ExperimentConfig& config,
                                                   const ProblemInstance& instance,
                                                   const Subset& optimal);

struct RunOptions {
  bool keep_rounds = false;  // retain every RoundTrace
};

struct RunResult {
  PolicyKind policy = PolicyKind::scucb;
  std::uint64_t seed = 0;
  ProblemInstance instance;
  Subset optimal;
  double opt = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
  RegretTrace regret;
  std::vector<double> cumulative_reward;  // sum of r_mu(S_t) through t
  std::vector<RoundTrace> rounds;         // only with keep_rounds
  std::vector<char> lemma1_violation;     // index t-1; zero during initialization
  std::vector<std::int64_t> suboptimal_counters;
  std::size_t oracle_failures = 0;
  PolicyState final_state;
  BudgetLedger final_ledger;

  double final_regret() const { return regret.cumulative_regret.back(); }
};

/// One replication: instance generation, m initialization rounds, then
/// select -> env_step -> update with metrics recorded every round.
RunResult run_single(const ExperimentConfig& config, PolicyKind policy,
                     std::uint64_t seed, const RunOptions& options = {});

struct SeriesRow {
  std::size_t t = 0;
  double cum_regret = 0.0;
  double cum_reward = 0.0;
};

struct SeedSeries {
  std::uint64_t seed = 0;
  std::vector<SeriesRow> rows;  // rounds with t % stride == 0
};

struct CellSummary {
  std::string cell;  // label of the sweep value
  PolicyKind policy = PolicyKind::scucb;
  std::vector<std::uint64_t> seeds;
  std::vector<double> final_regrets;  // per seed, same order as seeds
  std::vector<double> final_rewards;
  double mean_final_regret = 0.0;
  double std_final_regret = 0.0;
  double mean_final_reward = 0.0;
  double std_final_reward = 0.0;
  std::vector<double> mean_regret_curve;   // length T
  std::vector<double> lemma1_violation_rate;  // length T
  std::vector<SeedSeries> series;
};

struct RunSummary {
  nlohmann::json config;
  std::string config_hash;
  std::string axis;  // empty for a single-cell run
  std::vector<std::uint64_t> seeds;
  std::size_t record_stride = 1;
  std::vector<CellSummary> cells;

  const CellSummary& cell(const std::string& label, PolicyKind policy) const;
};

struct SweepAxis {
  std::string field;                   // any config key, e.g. max_budget
  std::vector<nlohmann::json> values;  // one cell per value
};

/// Runs every (cell, policy, seed) combination, sharing seeds across cells
/// so comparisons are paired. Results are folded in (cell, policy, seed)
/// order regardless of which thread finished first.
RunSummary run_sweep(const ExperimentConfig& config, const SweepAxis& axis);

/// Sweep with a single cell labelled "base".
RunSummary run_experiment(const ExperimentConfig& config);

std::string cell_label(const nlohmann::json& value);

/// Header `policy,cell,seed,t,cum_regret,cum_reward`, one row per recorded
/// round.
void write_csv(const RunSummary& summary, std::ostream& out);
std::string to_csv(const RunSummary& summary);

nlohmann::json summary_to_json(const RunSummary& summary);
/// Inverse of summary_to_json for every numeric field it writes. Per-seed
/// series are not part of the JSON document.
RunSummary summary_from_json(const nlohmann::json& doc);

enum class OutputFormat { csv, json };

/// Writes the summary; throws IoError when the path cannot be written.
void emit_results(const RunSummary& summary, OutputFormat format,
                  const std::string& path);

/// Compiler, standard library, and Eigen version of this build.
nlohmann::json environment_fingerprint();

/// Directory from SCUCB_OUTPUT_DIR, or "." when unset.
std::string default_output_dir();

/// Empirical frequency of the confidence-event failure at fixed rounds.
struct Lemma1Checkpoint {
  std::size_t t = 0;
  std::size_t failures = 0;
  std::size_t trials = 0;
  double frequency = 0.0;
  double bound = 0.0;      // min(1, 2m/t^2)
  double tolerance = 0.0;  // 3 binomial standard deviations at the bound
  bool pass = false;
};

std::vector<Lemma1Checkpoint> verify_lemma1(const ExperimentConfig& config,
                                            PolicyKind policy,
                                            const std::vector<std::size_t>& checkpoints);

/// Least-squares fit y = a + b x and its coefficient of determination.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

LinearFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace scucb
