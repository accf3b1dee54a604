#include <gtest/gtest.h>

#include <random>

#include "flowgame/flowgame.hpp"
#include "oracles.hpp"

using namespace flowgame;

TEST(ImprovingMove, ChainIsStable) {
  const auto cr = scenarios::gen_chain_vs_ring(6);
  for (std::size_t u = 0; u < 6; ++u) EXPECT_FALSE(improving_move(cr.game, cr.chain, u));
}

TEST(ImprovingMove, OnlyOptionIsTaken) {
  const FlowGame g = load_instance(R"({"scale": 5, "producers": [10], "users": [
      {"id": 1, "budget": 1, "weights": {"10": 5}}]})");
  const auto m = improving_move(g, Configuration(1), 0);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->after, Strategy{g.producer_node(0)});
  EXPECT_EQ(m->utility_after - m->utility_before, 5);
}

TEST(ImprovingMove, RestrictedThirdSlotSwitch) {
  const auto inst = scenarios::gen_instability();
  SearchOptions opt{SearchMode::restricted, 1'000'000, inst.candidates};
  const auto m = improving_move(inst.game, inst.initial, inst.u2, opt);
  ASSERT_TRUE(m);
  EXPECT_TRUE(std::find(m->after.begin(), m->after.end(), inst.r2) != m->after.end());
  EXPECT_EQ(m->utility_before, 702);
  EXPECT_EQ(m->utility_after, 801);
  EXPECT_EQ(m->utility_after - m->utility_before, 99);
}

TEST(ImprovingMove, ExhaustiveCapThrows) {
  const auto g = scenarios::gen_random_homogeneous(8, 8, 3, 3, 1);
  SearchOptions opt;
  opt.exhaustive_cap = 10;
  EXPECT_THROW(improving_move(g, Configuration(g.n()), 0, opt), CapExceeded);
}

TEST(ImprovingMove, ExhaustiveAgreesWithDeviationOracle) {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto g = scenarios::gen_random_weighted(3, 3, 2, 4, seed);
    const auto c = scenarios::random_configuration(g, rng);
    EXPECT_EQ(!is_equilibrium(g, c).is_equilibrium, oracle::has_profitable_deviation(g, c)) << seed;
  }
}

TEST(ImprovingMove, BestResponseIsLexicographicallySmallest) {
  // Two producers worth the same; budget 1 picks the lower one.
  const FlowGame g = load_instance(R"({"producers": [10, 11], "users": [
      {"id": 1, "budget": 1, "weights": {"10": 1, "11": 1}}]})");
  const auto m = improving_move(g, Configuration(1), 0);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->after, Strategy{g.producer_node(0)});
}

TEST(StrategyCount, Binomials) {
  EXPECT_EQ(strategy_count(5, 2, 1000), 1u + 5u + 10u);
  EXPECT_EQ(strategy_count(3, 5, 1000), 8u);
  EXPECT_EQ(strategy_count(60, 30, 1000), 1001u);  // saturated
}

TEST(Potential, HomogeneousExamples) {
  const auto cr = scenarios::gen_chain_vs_ring(6);
  auto chain = potential_homogeneous(cr.game, cr.chain).counts;
  ASSERT_EQ(chain.size(), 7u);
  EXPECT_EQ(chain[2], 6);
  for (std::size_t i = 0; i < 7; ++i)
    if (i != 2) {
      EXPECT_EQ(chain[i], 0);
    }
  EXPECT_EQ(potential_homogeneous(cr.game, cr.ring).counts[6], 6);
  EXPECT_EQ(potential_homogeneous(cr.game, Configuration(6)).counts[0], 6);
}

TEST(Potential, MetricEmptyAndFull) {
  const FlowGame g = scenarios::gen_grid_metric(3, 3, 1);
  for (auto v : potential_metric(g, Configuration(g.n())).counts) EXPECT_EQ(v, 0);

  const auto c = build_optimal_configuration(g, 1);
  const auto tuple = potential_metric(g, c.config).counts;
  const auto dist = g.metric().distinct_distances();
  ASSERT_EQ(tuple.size(), dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    std::int64_t pairs = 0;
    for (std::size_t u = 0; u < g.n(); ++u)
      for (std::size_t s = 0; s < g.p(); ++s)
        if (g.subject_distance(u, s) <= g.radius(u) && g.subject_distance(u, s) == dist[i]) ++pairs;
    EXPECT_EQ(tuple[i], pairs) << "distance " << dist[i];
  }
}

TEST(Dynamics, HomogeneousConvergesWithDecreasingPotential) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = scenarios::gen_random_homogeneous(5, 5, 1, 3, seed);
    std::mt19937_64 rng(seed);
    const auto start = scenarios::random_configuration(g, rng);
    for (auto kind : {SchedulerKind::round_robin, SchedulerKind::random}) {
      const auto t = run_dynamics(g, start, {kind, seed}, {});
      EXPECT_EQ(t.verdict.kind, Verdict::Kind::converged);
      EXPECT_EQ(t.potential, PotentialKind::homogeneous);
      ASSERT_EQ(t.potentials.size(), t.moves.size() + 1);
      for (std::size_t i = 1; i < t.potentials.size(); ++i)
        EXPECT_LT(t.potentials[i], t.potentials[i - 1]);
      EXPECT_TRUE(is_equilibrium(g, t.final).is_equilibrium);
    }
  }
}

TEST(Dynamics, MetricPotentialIncreases) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = scenarios::gen_random_metric(4, 6, 2, 4, seed);
    const auto t = run_dynamics(g, Configuration(g.n()), {SchedulerKind::random, seed}, {});
    EXPECT_EQ(t.potential, PotentialKind::metric);
    for (std::size_t i = 1; i < t.potentials.size(); ++i)
      EXPECT_GT(t.potentials[i], t.potentials[i - 1]);
  }
}

TEST(Dynamics, InstabilityCycles) {
  const auto inst = scenarios::gen_instability();
  const auto t = run_dynamics(inst.game, inst.initial, {},
                              {SearchMode::restricted, 1'000'000, inst.candidates});
  EXPECT_EQ(t.verdict.kind, Verdict::Kind::cycled);
  EXPECT_EQ(t.verdict.cycle_entry, 0u);
  EXPECT_EQ(t.verdict.period, 4u);
  EXPECT_EQ(t.certification, Certification::restricted);
}

TEST(Dynamics, EquilibriumStartConvergesImmediately) {
  const auto cr = scenarios::gen_chain_vs_ring(5);
  const auto t = run_dynamics(cr.game, cr.ring, {}, {});
  EXPECT_EQ(t.verdict.kind, Verdict::Kind::converged);
  EXPECT_TRUE(t.moves.empty());
  EXPECT_EQ(t.final, cr.ring);
}

TEST(Dynamics, StepLimitZero) {
  const auto g = scenarios::gen_random_homogeneous(3, 3, 2, 2, 0);
  const auto t = run_dynamics(g, Configuration(g.n()), {}, {}, {0, 0});
  EXPECT_EQ(t.verdict.kind, Verdict::Kind::step_limit);
  EXPECT_TRUE(t.moves.empty());
}

TEST(Dynamics, ReplayReproducesEveryState) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = scenarios::gen_random_weighted(5, 4, 2, 9, seed);
    const auto t = run_dynamics(g, Configuration(g.n()), {SchedulerKind::random, seed},
                                {SearchMode::swap, 1'000'000, {}}, {200, 0});
    const auto states = replay(g, t);
    ASSERT_EQ(states.size(), t.moves.size() + 1);
    EXPECT_EQ(states.back(), t.final);
    for (std::size_t i = 0; i < t.moves.size(); ++i) {
      const auto& m = t.moves[i];
      EXPECT_EQ(active_utility(g, disseminate_active(g, states[i])[m.user], m.user), m.utility_before);
      EXPECT_EQ(active_utility(g, disseminate_active(g, states[i + 1])[m.user], m.user),
                m.utility_after);
      EXPECT_GT(m.utility_after, m.utility_before);
    }
  }
}

TEST(Dynamics, SeededRunsAreDeterministic) {
  const auto g = scenarios::gen_random_homogeneous(6, 6, 2, 3, 17);
  const Scheduler s{SchedulerKind::random, 99};
  const auto a = run_dynamics(g, Configuration(g.n()), s, {});
  const auto b = run_dynamics(g, Configuration(g.n()), s, {});
  EXPECT_EQ(a.moves, b.moves);
  EXPECT_EQ(a.final, b.final);
}

TEST(DetectCycle, ReportsFirstRecurrence) {
  const auto inst = scenarios::gen_instability();
  const auto t = run_dynamics(inst.game, inst.initial, {},
                              {SearchMode::restricted, 1'000'000, inst.candidates});
  const auto cycle = detect_cycle(replay(inst.game, t));
  ASSERT_TRUE(cycle);
  EXPECT_EQ(cycle->entry, 0u);
  EXPECT_EQ(cycle->period, 4u);

  const auto g = scenarios::gen_random_homogeneous(4, 4, 2, 3, 1);
  const auto conv = run_dynamics(g, Configuration(g.n()), {}, {});
  EXPECT_FALSE(detect_cycle(replay(g, conv)));
}
