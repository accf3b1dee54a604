#include <gtest/gtest.h>

#include <random>

#include "flowgame/flowgame.hpp"
#include "oracles.hpp"

using namespace flowgame;

namespace {

// Line metric with user centers at 0, 1, 2 and a subject at 0.
FlowGame line_game() {
  const MetricSpace d = scenarios::line_metric(3, 0);
  std::vector<UserSpec> users{{UserId{10}, 1, {}, MetricInterest{1, 2}},
                              {UserId{11}, 1, {}, MetricInterest{2, 2}}};
  return FlowGame(1, {SubjectId{0}}, users, d, FilterMode::expertise_filtered,
                  UtilityMode::nearest_subject);
}

std::vector<std::vector<bool>> rows(const FlowGame& g, const Dissemination& d) {
  std::vector<std::vector<bool>> out(g.n(), std::vector<bool>(g.p()));
  for (std::size_t u = 0; u < g.n(); ++u)
    for (std::size_t s = 0; s < g.p(); ++s) out[u][s] = d[u].test(s);
  return out;
}

}  // namespace

TEST(Disseminate, ChainGetsEndpointsOnly) {
  const auto cr = scenarios::gen_chain_vs_ring(6);
  const auto d = disseminate(cr.game, cr.chain);
  for (std::size_t u = 0; u < 6; ++u) {
    EXPECT_EQ(d[u].count(), 2u);
    EXPECT_TRUE(d[u].test(0));
    EXPECT_TRUE(d[u].test(5));
  }
}

TEST(Disseminate, EmptyConfiguration) {
  const auto g = scenarios::gen_random_weighted(4, 3, 2, 5, 3);
  const auto d = disseminate(g, Configuration(g.n()));
  for (std::size_t u = 0; u < g.n(); ++u) EXPECT_TRUE(d[u].none());
}

TEST(Disseminate, UninterestedUserDoesNotRelay) {
  // user 1 follows producer 10 but values nothing there; user 2 follows user 1.
  const FlowGame g = load_instance(R"({"producers": [10, 11], "users": [
      {"id": 1, "budget": 1, "weights": {"11": 1}},
      {"id": 2, "budget": 1, "weights": {"10": 1}}]})");
  const auto cfg = load_configuration(g, R"({"follows": {"1": [10], "2": [1]}})").config;
  const auto d = disseminate(g, cfg);
  EXPECT_TRUE(d[0].test(0));   // receives it
  EXPECT_FALSE(d[1].test(0));  // but does not forward it
}

TEST(Disseminate, MatchesPathEnumeration) {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const std::size_t n = 2 + seed % 3, p = 1 + seed % 3;
    const auto g = scenarios::gen_random_weighted(n, p, 3, 3, seed);
    const auto c = scenarios::random_configuration(g, rng);
    EXPECT_EQ(rows(g, disseminate(g, c)), oracle::path_enumeration(g, c, false)) << seed;
  }
}

TEST(DisseminateExpertise, MonotonePathOnLine) {
  const FlowGame g = line_game();
  const Node subject = g.producer_node(0);
  // 0 -> u(1) -> u(2): distances 1 then 2, allowed
  Configuration up(2);
  up.set_strategy(g, 0, {subject});
  up.set_strategy(g, 1, {0});
  EXPECT_TRUE(disseminate_expertise(g, up)[1].test(0));
  // 0 -> u(2) -> u(1): last hop goes from distance 2 to 1, blocked
  Configuration down(2);
  down.set_strategy(g, 1, {subject});
  down.set_strategy(g, 0, {1});
  const auto d = disseminate_expertise(g, down);
  EXPECT_TRUE(d[1].test(0));
  EXPECT_FALSE(d[0].test(0));
  EXPECT_TRUE(disseminate(g, down)[0].test(0));
}

TEST(DisseminateExpertise, MatchesMonotonePathEnumeration) {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto g = scenarios::gen_random_metric(3, 3 + seed % 2, 2, 3, seed, 8);
    const auto c = scenarios::random_configuration(g, rng);
    EXPECT_EQ(rows(g, disseminate_expertise(g, c)), oracle::path_enumeration(g, c, true)) << seed;
  }
}

TEST(DisseminateExpertise, SubsetOfPlainReception) {
  std::mt19937_64 rng(9);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto g = scenarios::gen_random_metric(5, 6, 3, 4, seed);
    const auto c = scenarios::random_configuration(g, rng);
    const auto plain = disseminate(g, c), expert = disseminate_expertise(g, c);
    for (std::size_t u = 0; u < g.n(); ++u) EXPECT_TRUE(expert[u].is_subset_of(plain[u]));
  }
}

TEST(Disseminate, MonotoneUnderAddedEdges) {
  std::mt19937_64 rng(21);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto g = scenarios::gen_random_homogeneous(5, 5, 2, 3, seed);
    auto c = scenarios::random_configuration(g, rng);
    const auto before = disseminate(g, c);
    // add one link for a user with spare budget
    for (std::size_t u = 0; u < g.n(); ++u) {
      if (c.follows(u).size() >= static_cast<std::size_t>(g.budget(u))) continue;
      Strategy s = c.follows(u);
      for (Node v = 0; v < g.node_count(); ++v)
        if (v != u && std::find(s.begin(), s.end(), v) == s.end()) {
          s.push_back(v);
          break;
        }
      c.set_strategy(g, u, s);
      break;
    }
    const auto after = disseminate(g, c);
    for (std::size_t u = 0; u < g.n(); ++u) EXPECT_TRUE(before[u].is_subset_of(after[u]));
  }
}

TEST(Utility, InstabilityInitialValues) {
  const auto inst = scenarios::gen_instability();
  const auto d = disseminate(inst.game, inst.initial);
  EXPECT_EQ(utility(inst.game, d, inst.u1), 801);
  EXPECT_EQ(utility(inst.game, d, inst.u2), 702);
  EXPECT_EQ(utility(inst.game, SubjectSet(inst.game.p()), inst.u1), 0);
}

TEST(Utility, BoundedByMaximum) {
  std::mt19937_64 rng(2);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto g = scenarios::gen_random_weighted(5, 5, 3, 20, seed);
    const auto c = scenarios::random_configuration(g, rng);
    const auto d = disseminate(g, c);
    for (std::size_t u = 0; u < g.n(); ++u) {
      EXPECT_GE(utility(g, d, u), 0);
      EXPECT_LE(utility(g, d, u), max_utility(g, u));
      EXPECT_EQ(utility(g, d, u), oracle::utility_of(g, oracle::path_enumeration(g, c, false)[u], u));
    }
  }
}

TEST(UtilityNearest, FirstGapCapsRadius) {
  // user at 0 with radius 4; subjects at 1, 2, 3, 4
  const MetricSpace d = scenarios::line_metric(5, 0);
  const FlowGame g(1, {SubjectId{1}, SubjectId{2}, SubjectId{3}, SubjectId{4}},
                   {UserSpec{UserId{10}, 4, {}, MetricInterest{0, 4}}}, d,
                   FilterMode::expertise_filtered, UtilityMode::nearest_subject);
  SubjectSet got(4);
  got.set(0);
  got.set(1);
  got.set(3);
  EXPECT_EQ(utility_nearest(g, got, 0), 2);
  got.set(2);
  EXPECT_EQ(utility_nearest(g, got, 0), 4);
  EXPECT_EQ(utility_nearest(g, SubjectSet(4), 0), 0);
}

TEST(UtilityNearest, FullBallGivesRadius) {
  const FlowGame g = scenarios::gen_grid_metric(3, 3, 1);
  SubjectSet all(g.p());
  all.set();
  for (std::size_t u = 0; u < g.n(); ++u) EXPECT_EQ(utility_nearest(g, all, u), g.radius(u));
}

TEST(UtilityNearest, MatchesDefinitionOracle) {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const auto g = scenarios::gen_random_metric(4, 5, 3, 4, seed);
    const auto c = scenarios::random_configuration(g, rng);
    const auto got = oracle::path_enumeration(g, c, true);
    const auto d = disseminate_expertise(g, c);
    for (std::size_t u = 0; u < g.n(); ++u)
      EXPECT_EQ(utility_nearest(g, d, u), oracle::utility_of(g, got[u], u)) << seed;
  }
}
