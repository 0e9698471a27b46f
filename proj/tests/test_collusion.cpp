#include "scucb/collusion.hpp"
#include "scucb/harness.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace scucb;
using namespace scucb::testing;

namespace {

CollusionProgram program_of(std::vector<double> budgets, std::vector<double> gaps,
                            std::int64_t horizon = 0) {
  CollusionProgram p;
  p.budgets = Eigen::Map<Eigen::VectorXd>(budgets.data(), static_cast<Eigen::Index>(budgets.size()));
  p.gaps = Eigen::Map<Eigen::VectorXd>(gaps.data(), static_cast<Eigen::Index>(gaps.size()));
  p.horizon = horizon;
  return p;
}

bool naive_feasible(double b, double d, std::int64_t y, std::int64_t t) {
  if (y == 0) return true;
  const double lt = std::log(static_cast<double>(t));
  return b / static_cast<double>(y) + std::sqrt(3.0 * lt / static_cast<double>(y)) >=
         d + std::sqrt(3.0 * lt);
}

// Plain nested scan over every permutation and every Y vector.
double naive_best(const CollusionProgram& p, std::int64_t cap) {
  const std::size_t m = p.num_arms();
  std::vector<std::size_t> perm(m);
  for (std::size_t i = 0; i < m; ++i) perm[i] = i;
  double best = 0.0;
  std::vector<std::int64_t> y(m, 0);
  do {
    std::fill(y.begin(), y.end(), 0);
    for (;;) {
      bool ok = true;
      std::int64_t prefix = 0;
      for (std::size_t a : perm) {
        prefix += y[a];
        ok = ok && naive_feasible(p.budgets(static_cast<Eigen::Index>(a)),
                                  p.gaps(static_cast<Eigen::Index>(a)), y[a], prefix);
      }
      if (ok) {
        double v = 0.0;
        for (std::size_t a = 0; a < m; ++a) v += p.weight(a) * static_cast<double>(y[a]);
        best = std::max(best, v);
      }
      std::size_t pos = 0;
      while (pos < m && y[pos] == cap) y[pos++] = 0;
      if (pos == m) break;
      ++y[pos];
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("constraint edge cases") {
  CHECK(collusion_constraint_holds(0.0, 0.5, 0, 1));
  CHECK_FALSE(collusion_constraint_holds(10.0, 0.5, 3, 0));
  CHECK_FALSE(collusion_constraint_holds(10.0, 0.5, -1, 5));
  // Y = 1, t = 1: B >= delta.
  CHECK(collusion_constraint_holds(0.5, 0.5, 1, 1));
  CHECK_FALSE(collusion_constraint_holds(0.4, 0.5, 1, 1));
}

TEST_CASE("zero budgets give the zero solution") {
  const auto p = program_of({0.0, 0.0, 0.0}, {0.2, 0.4, 0.1});
  const auto sol = solve_collusion_bruteforce(p, 20);
  CHECK(sol.pulls == std::vector<std::int64_t>{0, 0, 0});
  CHECK(sol.objective == 0.0);
  CHECK(sol.permutation == std::vector<std::size_t>{0, 1, 2});
  for (const auto& s : plan_to_strategy(p, sol)) CHECK(s.kind == StrategyKind::none);
}

TEST_CASE("single arm matches a direct scan over Y") {
  const auto p = program_of({100.0}, {0.5});
  const auto sol = solve_collusion_bruteforce(p, 500);
  std::int64_t best_y = 0;
  for (std::int64_t y = 0; y <= 500; ++y)
    if (naive_feasible(100.0, 0.5, y, y)) best_y = y;
  CHECK(best_y > 0);
  CHECK(sol.pulls[0] == best_y);
  CHECK(sol.deadlines[0] == best_y);
  CHECK(sol.objective == 0.5 * static_cast<double>(best_y));
  CHECK_NOTHROW(validate_collusion_solution(p, sol));
}

TEST_CASE("solver equals the naive scan on small random programs") {
  Rng gen = make_stream(50, "test");
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + uniform_index(gen, 2);
    const std::int64_t cap = 1 + static_cast<std::int64_t>(uniform_index(gen, 50));
    auto p = program_of({}, {});
    p.budgets = random_vector(gen, m, 0.0, 30.0);
    p.gaps = random_vector(gen, m, 0.0, 1.0);
    if (trial % 4 == 0) p.objective = CollusionObjective::unit;
    const auto sol = solve_collusion_bruteforce(p, cap);
    REQUIRE(sol.objective == naive_best(p, cap));
    REQUIRE_NOTHROW(validate_collusion_solution(p, sol));
  }
  for (int trial = 0; trial < 20; ++trial) {
    auto p = program_of({}, {});
    p.budgets = random_vector(gen, 3, 0.0, 10.0);
    p.gaps = random_vector(gen, 3, 0.0, 1.0);
    const auto sol = solve_collusion_bruteforce(p, 8);
    REQUIRE(sol.objective == doctest::Approx(naive_best(p, 8)).epsilon(1e-12));
  }
}

TEST_CASE("returned solutions are feasible, with minimal deadlines") {
  Rng gen = make_stream(51, "test");
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 1 + uniform_index(gen, 4);
    auto p = program_of({}, {}, trial % 2 ? 0 : 40);
    p.budgets = random_vector(gen, m, 0.0, 20.0);
    p.gaps = random_vector(gen, m, 0.0, 0.8);
    const auto sol = solve_collusion_bruteforce(p, 12);
    REQUIRE_NOTHROW(validate_collusion_solution(p, sol));
    std::int64_t prefix = 0;
    for (std::size_t a : sol.permutation) {
      prefix += sol.pulls[a];
      REQUIRE(sol.deadlines[a] == prefix);
    }
    if (p.horizon > 0) {
      std::int64_t total = 0;
      for (auto y : sol.pulls) total += y;
      REQUIRE(total <= p.horizon);
    }
  }
}

TEST_CASE("objective scales with the gaps at a fixed point") {
  Rng gen = make_stream(52, "test");
  for (int trial = 0; trial < 50; ++trial) {
    auto p = program_of({}, {});
    p.budgets = random_vector(gen, 3, 0.0, 10.0);
    p.gaps = random_vector(gen, 3, 0.0, 1.0);
    std::vector<std::int64_t> y{static_cast<std::int64_t>(uniform_index(gen, 9)),
                                static_cast<std::int64_t>(uniform_index(gen, 9)),
                                static_cast<std::int64_t>(uniform_index(gen, 9))};
    auto doubled = p;
    doubled.gaps *= 2.0;
    REQUIRE(collusion_objective(doubled, y) == doctest::Approx(2.0 * collusion_objective(p, y)));
  }
}

TEST_CASE("validation catches broken solutions") {
  const auto p = program_of({10.0, 5.0}, {0.3, 0.2});
  auto sol = solve_collusion_bruteforce(p, 20);
  REQUIRE_NOTHROW(validate_collusion_solution(p, sol));

  auto bad = sol;
  bad.objective += 1.0;
  CHECK_THROWS_AS(validate_collusion_solution(p, bad), ValidationError);
  bad = sol;
  bad.permutation = {0, 0};
  CHECK_THROWS_AS(validate_collusion_solution(p, bad), ValidationError);
  bad = sol;
  bad.pulls[0] = 1000;
  bad.objective = collusion_objective(p, bad.pulls);
  CHECK_THROWS_AS(validate_collusion_solution(p, bad), ValidationError);
  CHECK_THROWS_AS(plan_to_strategy(p, bad), ValidationError);
  bad = sol;
  for (auto& d : bad.deadlines) d = 0;
  if (sol.pulls[0] + sol.pulls[1] > 0) CHECK_THROWS_AS(validate_collusion_solution(p, bad), ValidationError);
}

TEST_CASE("solver capability limits") {
  std::vector<double> seven(7, 1.0);
  CHECK_THROWS_AS(solve_collusion_bruteforce(program_of(seven, seven), 2), CapabilityError);
  std::vector<double> six(6, 1.0);
  CHECK_THROWS_AS(solve_collusion_bruteforce(program_of(six, six), 500), CapabilityError);
  CHECK_THROWS_AS(solve_collusion_bruteforce(program_of({1.0}, {1.0, 2.0}), 2), ValidationError);
  CHECK_THROWS_AS(solve_collusion_bruteforce(program_of({-1.0}, {1.0}), 2), ValidationError);
  CHECK_THROWS_AS(solve_collusion_bruteforce(program_of({1.0}, {1.0}), -1), ValidationError);
}

TEST_CASE("plan_to_strategy respects budgets") {
  const auto p = program_of({50.0}, {0.1});
  CollusionSolution sol;
  sol.permutation = {0};
  sol.pulls = {10};
  sol.deadlines = {10};
  sol.objective = 1.0;
  REQUIRE_NOTHROW(validate_collusion_solution(p, sol));
  const auto strategies = plan_to_strategy(p, sol);
  REQUIRE(strategies[0].kind == StrategyKind::collusion_plan);
  double total = 0.0;
  for (double z : strategies[0].schedule) total += z;
  CHECK(total <= 50.0 + 1e-12);
  CHECK(strategies[0].schedule.size() == 10);
}

TEST_CASE("lsi variant orderings") {
  const auto vec = [](std::vector<double> v) {
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  CHECK(lsi_variant_plan(LsiVariant::pb, vec({30, 10, 20}), vec({0.1, 0.1, 0.1}), 3).order ==
        std::vector<std::size_t>{0, 2, 1});
  CHECK(lsi_variant_plan(LsiVariant::pd, vec({5, 5, 5}), vec({0.1, 0.3, 0.2}), 3).order ==
        std::vector<std::size_t>{0, 2, 1});
  CHECK(lsi_variant_plan(LsiVariant::pbd, vec({30, 10, 20}), vec({0.1, 0.3, 0.2}), 3).order ==
        std::vector<std::size_t>{1, 2, 0});
  // Ties keep the lower index first; arms without budget never burst.
  CHECK(lsi_variant_plan(LsiVariant::pb, vec({7, 0, 7}), vec({0.1, 0.1, 0.1}), 3).order ==
        std::vector<std::size_t>{0, 2});
  CHECK_THROWS_AS(lsi_variant_plan(LsiVariant::pb, vec({1, 2}), vec({0.1, 0.1}), 3), ShapeError);
  CHECK(lsi_variant_from_string("pbd") == LsiVariant::pbd);
  CHECK(strategy_kind(LsiVariant::pd) == StrategyKind::pd_lsi);
  CHECK_THROWS_AS(lsi_variant_from_string("xx"), ValidationError);
}

TEST_CASE("lsi variant spend totals equal each budget") {
  Rng gen = make_stream(53, "test");
  for (auto variant : {LsiVariant::pb, LsiVariant::pd, LsiVariant::pbd}) {
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t m = 1 + uniform_index(gen, 8);
      Eigen::VectorXd b = random_vector(gen, m, 0.0, 30.0);
      if (trial % 3 == 0) b(0) = 0.0;
      const auto d = random_vector(gen, m, 0.0, 1.0);
      const auto plan = lsi_variant_plan(variant, b, d, m);
      Eigen::VectorXd totals = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
      for (const auto& s : plan.spends) {
        REQUIRE(s.amount > 0.0);
        totals(static_cast<Eigen::Index>(s.arm)) += s.amount;
      }
      for (Eigen::Index i = 0; i < b.size(); ++i) REQUIRE(totals(i) == doctest::Approx(b(i)));

      // The strategies replay the plan when each arm is pulled every round.
      const auto strategies = lsi_variant_strategies(variant, b, d);
      BudgetLedger ledger(b);
      std::vector<ArmHistory> hist(m);
      Rng rng;
      std::vector<SpendEntry> replay;
      for (std::size_t t = 1; t <= 3 * m + 2; ++t)
        for (std::size_t a = 0; a < m; ++a) {
          if (t < a + 1) continue;  // arm a is first pulled in its initialization round
          const double z = ledger.debit(a, compute_manipulation(strategies[a], hist[a], ledger, a, t, rng));
          hist[a].append({t, 0.0, z});
          if (z > 0.0) replay.push_back({a, t, z});
        }
      for (const auto& s : plan.spends) {
        const auto hit = std::find_if(replay.begin(), replay.end(), [&](const SpendEntry& r) {
          return r.arm == s.arm && r.round == s.round;
        });
        REQUIRE(hit != replay.end());
        REQUIRE(hit->amount == doctest::Approx(s.amount));
      }
      REQUIRE(replay.size() == plan.spends.size());
    }
  }
}

TEST_CASE("a simulated learner delivers the planned pulls in most seeds") {
  ExperimentConfig cfg;
  cfg.num_arms = 4;
  cfg.action_size = 1;
  cfg.horizon = 3000;
  cfg.max_budget = 30.0;
  cfg.strategy = StrategyKind::collusion_plan;
  cfg.collusion_y_cap = 40;
  cfg.policies = {PolicyKind::cucb};
  int delivered = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto run = run_single(cfg, PolicyKind::cucb, seed);
    CollusionProgram program;
    program.budgets = run.instance.budgets;
    program.gaps = strategic_gaps(run.instance, run.optimal);
    program.horizon = static_cast<std::int64_t>(cfg.horizon);
    const auto sol = solve_collusion_bruteforce(program, cfg.collusion_y_cap);
    bool ok = true;
    for (std::size_t a = 0; a < cfg.num_arms; ++a)
      ok = ok && run.final_state.counts()(static_cast<Eigen::Index>(a)) >= sol.pulls[a];
    delivered += ok;
  }
  CHECK(delivered >= 12);
}
