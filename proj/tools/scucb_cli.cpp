// Command-line front end for the simulation harness.

#include "scucb/collusion.hpp"
#include "scucb/config.hpp"
#include "scucb/harness.hpp"
#include "scucb/metrics.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using nlohmann::json;
using namespace scucb;

namespace {

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("-c,--config", args.path, "JSON config file");
  cmd->add_option("-s,--set", args.overrides, "override a field: key=value (repeatable)");
  cmd->add_option("--seed", args.seed, "run a single seed instead of the configured list");
}

ExperimentConfig resolve_config(const ConfigArgs& args) {
  json doc;
  if (!args.path.empty()) {
    std::ifstream in(args.path);
    if (!in) throw IoError("cannot open config file: " + args.path);
    doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ValidationError("config file is not valid JSON: " + args.path);
  } else {
    doc = to_json(ExperimentConfig{});
  }
  for (const auto& o : args.overrides) apply_override(doc, o);
  if (args.seed) {
    doc["seeds"] = json::array({*args.seed});
    doc["replications"] = 0;
  }
  return config_from_json(doc);
}

struct OutputArgs {
  std::string format = "csv";
  std::string out;  // "-" writes to stdout
};

void add_output_options(CLI::App* cmd, OutputArgs& args) {
  cmd->add_option("-f,--format", args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("-o,--out", args.out,
                  "output file, '-' for stdout (default: $SCUCB_OUTPUT_DIR/<command>.<format>)");
}

void write_summary(const RunSummary& summary, const OutputArgs& args,
                   const std::string& stem) {
  const OutputFormat format = args.format == "json" ? OutputFormat::json : OutputFormat::csv;
  if (args.out == "-") {
    if (format == OutputFormat::csv)
      write_csv(summary, std::cout);
    else
      std::cout << summary_to_json(summary).dump(2) << '\n';
    return;
  }
  std::string path = args.out;
  if (path.empty()) {
    const std::filesystem::path dir = default_output_dir();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    path = (dir / (stem + "." + args.format)).string();
  }
  emit_results(summary, format, path);
  std::cerr << "wrote " << path << '\n';
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::vector<double> parse_list(const std::string& text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_array())
    throw ValidationError("expected a JSON array, got: " + text);
  try {
    return doc.get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ValidationError("expected an array of numbers, got: " + text);
  }
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strategic combinatorial bandit simulator"};
  app.require_subcommand(1);

  ConfigArgs run_cfg;
  OutputArgs run_out;
  auto* run = app.add_subcommand("run", "run every configured policy over the seed list");
  add_config_options(run, run_cfg);
  add_output_options(run, run_out);

  ConfigArgs sweep_cfg;
  OutputArgs sweep_out;
  std::string sweep_axis;
  std::string sweep_values;
  auto* sweep = app.add_subcommand("sweep", "run one cell per value of a config field");
  add_config_options(sweep, sweep_cfg);
  add_output_options(sweep, sweep_out);
  sweep->add_option("--axis", sweep_axis, "config field to vary, e.g. max_budget")->required();
  sweep->add_option("--values", sweep_values, "JSON array of values, e.g. [70,90]")->required();

  ConfigArgs gaps_cfg;
  auto* gaps = app.add_subcommand("gaps", "print optimum and suboptimality gaps of an instance");
  add_config_options(gaps, gaps_cfg);

  ConfigArgs lemma_cfg;
  std::string lemma_policy = "scucb";
  std::vector<std::size_t> lemma_rounds;
  auto* lemma = app.add_subcommand("verify-lemma1",
                                   "confidence-event failure frequency at fixed rounds");
  add_config_options(lemma, lemma_cfg);
  lemma->add_option("--policy", lemma_policy, "policy to run");
  lemma->add_option("--at", lemma_rounds, "rounds to check")->required();

  auto* bound = app.add_subcommand("bound", "evaluate the closed-form bounds");
  bound->require_subcommand(1);
  std::size_t b_arms = 0, b_horizon = 0, b_action = 1;
  double b_gap_max = 0, b_gap_min = 0, b_budget = 0;
  auto* regret = bound->add_subcommand("regret", "SCUCB regret bound for a linear reward");
  regret->add_option("--arms", b_arms)->required();
  regret->add_option("--gap-max", b_gap_max)->required();
  regret->add_option("--gap-min", b_gap_min)->required();
  regret->add_option("--max-budget", b_budget)->required();
  regret->add_option("--horizon", b_horizon)->required();
  regret->add_option("--action-size", b_action, "slope of the linear smoothness function");
  double t2_delta = 0, t2_eta = 0.1;
  std::int64_t t2_pulls = 0;
  auto* budget = bound->add_subcommand("budget", "budget needed to force pulls on a UCB learner");
  budget->add_option("--delta", t2_delta)->required();
  budget->add_option("--pulls", t2_pulls)->required();
  budget->add_option("--eta", t2_eta);

  std::string c_budgets, c_gaps;
  std::int64_t c_cap = 50, c_horizon = 0;
  bool c_unit = false;
  auto* collude = app.add_subcommand("collude", "solve the small collusion program");
  collude->add_option("--budgets", c_budgets, "JSON array")->required();
  collude->add_option("--gaps", c_gaps, "JSON array")->required();
  collude->add_option("--y-cap", c_cap, "largest pull target per arm");
  collude->add_option("--horizon", c_horizon, "deadline cap, 0 for none");
  collude->add_flag("--unit-weights", c_unit, "maximise total pulls instead of gap-weighted pulls");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      write_summary(run_experiment(resolve_config(run_cfg)), run_out, "run");
    } else if (*sweep) {
      const json values = json::parse(sweep_values, nullptr, false);
      if (values.is_discarded() || !values.is_array())
        throw ValidationError("--values must be a JSON array");
      SweepAxis axis{sweep_axis, std::vector<json>(values.begin(), values.end())};
      write_summary(run_sweep(resolve_config(sweep_cfg), axis), sweep_out, "sweep");
    } else if (*gaps) {
      const auto config = resolve_config(gaps_cfg);
      const auto instance = generate_instance(config, config.seeds.front());
      const auto report = compute_opt_and_gaps(instance, config.oracle_spec().alpha());
      json arms = json::array();
      for (std::size_t i = 0; i < instance.num_arms(); ++i)
        arms.push_back({{"arm", i},
                        {"mean", instance.means(static_cast<Eigen::Index>(i))},
                        {"budget", instance.budgets(static_cast<Eigen::Index>(i))},
                        {"gap_min", optional_json(report.arm_gap_min[i])},
                        {"gap_max", optional_json(report.arm_gap_max[i])}});
      const json out = {{"seed", config.seeds.front()},
                        {"alpha", report.alpha},
                        {"opt", report.opt},
                        {"optimal", report.optimal},
                        {"threshold", report.threshold},
                        {"suboptimal_subsets", report.suboptimal.size()},
                        {"gap_min", optional_json(report.gap_min)},
                        {"gap_max", optional_json(report.gap_max)},
                        {"arms", arms}};
      std::cout << out.dump(2) << '\n';
    } else if (*lemma) {
      const auto config = resolve_config(lemma_cfg);
      const auto rows = verify_lemma1(config, policy_from_string(lemma_policy), lemma_rounds);
      json out = json::array();
      bool all = true;
      for (const auto& r : rows) {
        all = all && r.pass;
        out.push_back({{"t", r.t}, {"failures", r.failures}, {"trials", r.trials},
                       {"frequency", r.frequency}, {"bound", r.bound},
                       {"tolerance", r.tolerance}, {"pass", r.pass}});
      }
      std::cout << json{{"policy", lemma_policy}, {"checkpoints", out}, {"pass", all}}.dump(2)
                << '\n';
    } else if (*regret) {
      const double value = theorem1_bound(
          b_arms, b_gap_max, b_gap_min, b_budget, b_horizon,
          [&](double gap) { return inverse_smoothness(LinearReward{}, b_action, gap); });
      std::cout << json{{"bound", value}}.dump() << '\n';
    } else if (*budget) {
      std::cout << json{{"budget", theorem2_budget_check(t2_delta, t2_pulls, t2_eta)}}.dump()
                << '\n';
    } else if (*collude) {
      CollusionProgram program;
      program.budgets = to_vector(parse_list(c_budgets));
      program.gaps = to_vector(parse_list(c_gaps));
      program.horizon = c_horizon;
      program.objective = c_unit ? CollusionObjective::unit : CollusionObjective::gap_weighted;
      const auto sol = solve_collusion_bruteforce(program, c_cap);
      json arms = json::array();
      for (std::size_t i = 0; i < program.num_arms(); ++i)
        arms.push_back({{"arm", i},
                        {"budget", program.budgets(static_cast<Eigen::Index>(i))},
                        {"gap", program.gaps(static_cast<Eigen::Index>(i))},
                        {"pulls", sol.pulls[i]},
                        {"deadline", sol.deadlines[i]}});
      std::cout << json{{"permutation", sol.permutation},
                        {"objective", sol.objective},
                        {"arms", arms}}
                       .dump(2)
                << '\n';
    }
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
