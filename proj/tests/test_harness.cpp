#include "scucb/config.hpp"
#include "scucb/harness.hpp"
#include "support.hpp"

#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

using namespace scucb;
using namespace scucb::testing;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.num_arms = 6;
  cfg.action_size = 2;
  cfg.horizon = 400;
  cfg.max_budget = 20.0;
  cfg.seeds = {3, 4, 5};
  cfg.threads = 2;
  return cfg;
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("run_single is deterministic") {
  const auto cfg = small_config();
  for (auto policy : {PolicyKind::scucb, PolicyKind::cucb, PolicyKind::tscb, PolicyKind::exp3cb}) {
    const auto a = run_single(cfg, policy, 11, {.keep_rounds = true});
    const auto b = run_single(cfg, policy, 11, {.keep_rounds = true});
    CHECK(a.final_regret() == b.final_regret());
    CHECK(a.rounds == b.rounds);
    CHECK(a.regret.cumulative_regret == b.regret.cumulative_regret);
  }
  CHECK(to_csv(run_experiment(cfg)) == to_csv(run_experiment(cfg)));
}

TEST_CASE("sweeps carry no hidden state and ignore thread count") {
  auto cfg = small_config();
  const auto first = summary_to_json(run_experiment(cfg));
  const auto second = summary_to_json(run_experiment(cfg));
  CHECK(first == second);
  cfg.threads = 1;
  auto serial = summary_to_json(run_experiment(cfg));
  CHECK(serial["cells"] == first["cells"]);
}

TEST_CASE("with no budget SCUCB curves equal CUCB curves") {
  auto cfg = small_config();
  cfg.max_budget = 0.0;
  const auto summary = run_experiment(cfg);
  CHECK(summary.cell("base", PolicyKind::scucb).mean_regret_curve ==
        summary.cell("base", PolicyKind::cucb).mean_regret_curve);
}

TEST_CASE("a default-sized run stays fast") {
  ExperimentConfig cfg;
  cfg.max_budget = 70.0;
  const auto start = std::chrono::steady_clock::now();
  const auto summary = run_experiment(cfg);
  const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
  CHECK(summary.cells.size() == 2);
  CHECK(took.count() < 5.0);
}

TEST_CASE("CSV row counts follow the stride") {
  auto cfg = small_config();
  cfg.num_arms = 4;
  cfg.horizon = 10;
  cfg.seeds = {1, 2};
  std::string csv = to_csv(run_experiment(cfg));
  CHECK(csv.rfind("policy,cell,seed,t,cum_regret,cum_reward\n", 0) == 0);
  CHECK(count_lines(csv) == 1 + 2 * 2 * 10);

  cfg.horizon = 5000;
  cfg.record_stride = 100;
  const auto summary = run_experiment(cfg);
  for (const auto& cell : summary.cells)
    for (const auto& s : cell.series) {
      REQUIRE(s.rows.size() == 50);
      CHECK(s.rows.front().t == 100);
      CHECK(s.rows.back().t == 5000);
    }
  csv = to_csv(summary);
  CHECK(count_lines(csv) == 1 + 2 * 2 * 50);
}

TEST_CASE("JSON summaries round-trip exactly") {
  auto cfg = small_config();
  const auto summary = run_sweep(cfg, {"max_budget", {0.0, 15.5}});
  const auto doc = summary_to_json(summary);
  const auto back = summary_from_json(nlohmann::json::parse(doc.dump()));
  CHECK(summary_to_json(back) == doc);
  REQUIRE(back.cells.size() == summary.cells.size());
  for (std::size_t c = 0; c < back.cells.size(); ++c) {
    CHECK(back.cells[c].final_regrets == summary.cells[c].final_regrets);
    CHECK(back.cells[c].mean_regret_curve == summary.cells[c].mean_regret_curve);
  }
  CHECK_THROWS_AS(summary_from_json(nlohmann::json{{"cells", 3}}), ValidationError);
}

TEST_CASE("emit_results writes files and reports unwritable paths") {
  const auto summary = run_experiment(small_config());
  const auto dir = std::filesystem::temp_directory_path() / "scucb_harness_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "out.csv").string();
  emit_results(summary, OutputFormat::csv, path);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == to_csv(summary));
  CHECK_THROWS_AS(emit_results(summary, OutputFormat::json, "/nonexistent-dir/x/out.json"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("policies on a shared seed see the same draws per arm") {
  const auto cfg = small_config();
  const auto a = run_single(cfg, PolicyKind::scucb, 9, {.keep_rounds = true});
  const auto b = run_single(cfg, PolicyKind::tscb, 9, {.keep_rounds = true});
  CHECK(a.instance.means == b.instance.means);
  CHECK(a.instance.budgets == b.instance.budgets);

  // The n-th raw draw of an arm is the same whichever policy asked for it.
  const auto per_arm = [&](const RunResult& r) {
    std::vector<std::vector<double>> out(cfg.num_arms);
    for (const auto& round : r.rounds)
      for (std::size_t j = 0; j < round.subset.size(); ++j) out[round.subset[j]].push_back(round.raw[j]);
    return out;
  };
  const auto xa = per_arm(a), xb = per_arm(b);
  for (std::size_t i = 0; i < cfg.num_arms; ++i) {
    const std::size_t n = std::min(xa[i].size(), xb[i].size());
    REQUIRE(n > 0);
    CHECK(std::equal(xa[i].begin(), xa[i].begin() + static_cast<std::ptrdiff_t>(n), xb[i].begin()));
  }
  // Initialization rounds coincide entirely.
  for (std::size_t t = 0; t < a.regret.init_rounds; ++t) CHECK(a.rounds[t] == b.rounds[t]);
}

TEST_CASE("config hash is stable and sensitive") {
  const auto cfg = small_config();
  CHECK(config_hash(cfg) == config_hash(config_from_json(to_json(cfg))));
  CHECK(config_hash(cfg).size() == 16);
  auto other = cfg;
  other.gamma = 0.3;
  CHECK(config_hash(other) != config_hash(cfg));
  other = cfg;
  other.seeds.push_back(99);
  CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("single-cell summary statistics") {
  const auto cfg = small_config();
  const auto summary = run_experiment(cfg);
  for (auto policy : cfg.policies) {
    const auto& cell = summary.cell("base", policy);
    REQUIRE(cell.final_regrets.size() == cfg.seeds.size());
    double sum = 0.0;
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
      const double r = run_single(cfg, policy, cfg.seeds[s]).final_regret();
      CHECK(cell.final_regrets[s] == r);
      sum += r;
    }
    const double mean = sum / static_cast<double>(cfg.seeds.size());
    CHECK(cell.mean_final_regret == doctest::Approx(mean).epsilon(1e-12));
    double ss = 0.0;
    for (double r : cell.final_regrets) ss += (r - mean) * (r - mean);
    CHECK(cell.std_final_regret == doctest::Approx(std::sqrt(ss / 2.0)).epsilon(1e-12));
    CHECK(cell.mean_regret_curve.back() == doctest::Approx(mean).epsilon(1e-12));
  }
  CHECK_THROWS(summary.cell("nope", PolicyKind::scucb));
}

TEST_CASE("sweep cells differ only along the axis") {
  auto cfg = small_config();
  const auto summary = run_sweep(cfg, {"max_budget", {0.0, 40.0}});
  CHECK(summary.axis == "max_budget");
  CHECK(summary.cells.size() == 4);
  cfg.max_budget = 40.0;
  const auto direct = run_single(cfg, PolicyKind::cucb, cfg.seeds[1]);
  CHECK(summary.cell(cell_label(40.0), PolicyKind::cucb).final_regrets[1] == direct.final_regret());
  CHECK_THROWS_AS(run_sweep(cfg, {"no_such_key", {1}}), ValidationError);
}

TEST_CASE("config validation and overrides") {
  auto doc = to_json(ExperimentConfig{});
  CHECK_NOTHROW(config_from_json(doc));

  auto bad = doc;
  bad["horizn"] = 100;
  CHECK_THROWS_AS(config_from_json(bad), ValidationError);

  bad = doc;
  bad["replications"] = 3;
  CHECK_THROWS_AS(config_from_json(bad), ValidationError);

  bad = doc;
  bad["horizon"] = 10;
  CHECK_THROWS_AS(config_from_json(bad), ValidationError);

  bad = doc;
  bad["policies"] = {"ucb9"};
  CHECK_THROWS_AS(config_from_json(bad), ValidationError);

  apply_override(doc, "horizon=1234");
  apply_override(doc, "strategy=random");
  apply_override(doc, "seeds=[7,8]");
  const auto cfg = config_from_json(doc);
  CHECK(cfg.horizon == 1234);
  CHECK(cfg.strategy == StrategyKind::random);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{7, 8});
  CHECK_THROWS_AS(apply_override(doc, "no-equals-sign"), ValidationError);
}

TEST_CASE("generate_instance") {
  auto cfg = small_config();
  cfg.budget_rule = BudgetRule::fixed;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = generate_instance(cfg, seed);
    const auto optimal = top_k(inst.means, cfg.action_size);
    for (std::size_t i = 0; i < cfg.num_arms; ++i) {
      const bool in_opt = std::find(optimal.begin(), optimal.end(), i) != optimal.end();
      CHECK(inst.budgets(static_cast<Eigen::Index>(i)) == (in_opt ? 0.0 : cfg.max_budget));
    }
    CHECK(inst.means.minCoeff() >= 0.0);
    CHECK(inst.means.maxCoeff() <= 1.0);
  }
  CHECK(generate_instance(cfg, 5).means == generate_instance(cfg, 5).means);
  CHECK(generate_instance(cfg, 5).means != generate_instance(cfg, 6).means);
}

TEST_CASE("strategic_gaps") {
  const auto inst = linear_instance({0.9, 0.2, 0.5, 0.7}, 2);
  const auto gaps = strategic_gaps(inst, {0, 3});
  CHECK(gaps(0) == 0.0);
  CHECK(gaps(1) == doctest::Approx(0.5));
  CHECK(gaps(2) == doctest::Approx(0.2));
  CHECK(gaps(3) == 0.0);
}

TEST_CASE("fit_line") {
  Eigen::VectorXd x(5), y(5);
  x << 0, 1, 2, 3, 4;
  y = (2.0 + 3.0 * x.array()).matrix();
  auto fit = fit_line(x, y);
  CHECK(fit.intercept == doctest::Approx(2.0));
  CHECK(fit.slope == doctest::Approx(3.0));
  CHECK(fit.r_squared == doctest::Approx(1.0));

  // Ordinary least squares written out with sums.
  Rng gen = make_stream(60, "test");
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + uniform_index(gen, 20);
    const auto xs = random_vector(gen, n, -5.0, 5.0);
    const auto ys = random_vector(gen, n, -5.0, 5.0);
    const double mx = xs.mean(), my = ys.mean();
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      sxy += (xs(k) - mx) * (ys(k) - my);
      sxx += (xs(k) - mx) * (xs(k) - mx);
      syy += (ys(k) - my) * (ys(k) - my);
    }
    fit = fit_line(xs, ys);
    REQUIRE(fit.slope == doctest::Approx(sxy / sxx).epsilon(1e-9));
    REQUIRE(fit.intercept == doctest::Approx(my - sxy / sxx * mx).epsilon(1e-9));
    REQUIRE(fit.r_squared == doctest::Approx(sxy * sxy / (sxx * syy)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(fit_line(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2)), ShapeError);
  CHECK_THROWS_AS(fit_line(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(3)), DomainError);
}

TEST_CASE("confidence event failures stay within the union bound on average") {
  ExperimentConfig cfg;
  cfg.num_arms = 5;
  cfg.action_size = 2;
  cfg.horizon = 10000;
  cfg.means_rule = MeansRule::list;
  cfg.means = {0.5, 0.5, 0.5, 0.5, 0.5};
  cfg.strategy = StrategyKind::none;
  cfg.max_budget = 0.0;
  cfg.gamma = 1.0;
  cfg.policies = {PolicyKind::scucb};
  cfg.seeds.resize(50);
  std::iota(cfg.seeds.begin(), cfg.seeds.end(), std::uint64_t{1});

  double bound = 0.0;
  for (std::size_t t = cfg.num_arms + 1; t <= cfg.horizon; ++t)
    bound += std::min(1.0, lemma1_failure_bound(cfg.num_arms, t));

  const auto summary = run_experiment(cfg);
  const auto& rate = summary.cell("base", PolicyKind::scucb).lemma1_violation_rate;
  const double mean_violations = std::accumulate(rate.begin(), rate.end(), 0.0);
  CHECK(mean_violations <= 1.5 * bound);
}
