#include <gtest/gtest.h>

#include "flowgame/flowgame.hpp"
#include "oracles.hpp"

using namespace flowgame;

namespace {

std::vector<std::size_t> all_points(const MetricSpace& d) {
  std::vector<std::size_t> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = i;
  return out;
}

// Subjects at every point of the line 0..len-1, users at `centers`.
FlowGame line_game(std::int64_t len, const std::vector<std::pair<std::int64_t, Distance>>& users,
                   int budget = 50) {
  std::vector<SubjectId> subjects;
  for (std::int64_t i = 0; i < len; ++i) subjects.push_back(SubjectId{i});
  std::vector<UserSpec> specs;
  for (std::size_t i = 0; i < users.size(); ++i)
    specs.push_back(UserSpec{UserId{1000 + static_cast<std::int64_t>(i)}, budget, {},
                             MetricInterest{users[i].first, users[i].second}});
  return FlowGame(1, subjects, specs, scenarios::line_metric(static_cast<std::size_t>(len), 0),
                  FilterMode::expertise_filtered, UtilityMode::nearest_subject);
}

}  // namespace

TEST(CheckMetric, Examples) {
  EXPECT_FALSE(check_metric(scenarios::line_metric(8)));
  const auto tri = check_metric(MetricSpace({1, 2, 3}, {{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}));
  ASSERT_TRUE(tri);
  EXPECT_EQ(tri->kind, MetricViolation::Kind::triangle);
  const auto asym = check_metric(MetricSpace({1, 2}, {{0, 1}, {2, 0}}));
  ASSERT_TRUE(asym);
  EXPECT_EQ(asym->kind, MetricViolation::Kind::asymmetric);
  const auto neg = check_metric(MetricSpace({1, 2}, {{0, -1}, {-1, 0}}));
  ASSERT_TRUE(neg);
  EXPECT_EQ(neg->kind, MetricViolation::Kind::negative);
  EXPECT_TRUE(find_coincident_points(MetricSpace({1, 2}, {{0, 0}, {0, 0}})));
}

TEST(Doubling, LineAndSinglePoint) {
  const auto line = scenarios::line_metric(16);
  const auto greedy = doubling_constant(line, DoublingMethod::greedy);
  EXPECT_LE(greedy.gamma, 3u);
  const auto exact = doubling_constant(line, DoublingMethod::exact);
  EXPECT_LE(exact.gamma, greedy.gamma);
  EXPECT_EQ(doubling_constant(scenarios::line_metric(1), DoublingMethod::exact).gamma, 1u);
}

TEST(Doubling, ExactMatchesBruteForceCover) {
  for (std::size_t side : {2u, 3u}) {
    const auto grid = scenarios::grid_metric(side);
    std::size_t brute = 1;
    for (Distance radius : grid.distinct_distances())
      for (std::size_t s = 0; s < grid.size(); ++s)
        brute = std::max(brute, oracle::min_cover(grid, grid.ball(s, radius), radius, 2));
    EXPECT_EQ(doubling_constant(grid, DoublingMethod::exact).gamma, brute) << side;
  }
}

TEST(Doubling, GreedyBoundsExactOnGrid) {
  const auto grid = scenarios::grid_metric(4);
  const auto g = doubling_constant(grid, DoublingMethod::greedy);
  const auto e = doubling_constant(grid, DoublingMethod::exact);
  EXPECT_GE(g.gamma, e.gamma);
  EXPECT_THROW(doubling_constant(scenarios::grid_metric(6), DoublingMethod::exact), CapExceeded);
}

TEST(CoveringRadius, LineExamples) {
  std::vector<std::pair<std::int64_t, Distance>> even;
  for (std::int64_t c = 0; c < 16; c += 2) even.push_back({c, 2});
  EXPECT_TRUE(covering_radius_check(line_game(16, even), 1).ok);

  std::vector<std::pair<std::int64_t, Distance>> gap;
  for (std::int64_t c = 0; c < 16; ++c)
    if (c < 6 || c > 8) gap.push_back({c, 2});
  const auto rep = covering_radius_check(line_game(16, gap), 1);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.witness, std::vector<std::int64_t>{7});
  EXPECT_TRUE(covering_radius_check(scenarios::gen_grid_metric(3, 3, 1), 1).ok);
}

TEST(Sparsity, Examples) {
  const auto line = scenarios::line_metric(10);
  EXPECT_EQ(sparsity(line, all_points(line), 1), 3u);
  EXPECT_EQ(sparsity(line, all_points(line), 0), 1u);
  const auto grid = scenarios::grid_metric(4);
  EXPECT_EQ(sparsity(grid, all_points(grid), 1), 5u);
}

TEST(Regularity, Examples) {
  EXPECT_TRUE(regularity_check(line_game(8, {{0, 4}, {3, 4}, {7, 4}}), 1).ok);
  const auto bad = regularity_check(line_game(8, {{0, 100}, {1, 1}}), 1);
  EXPECT_FALSE(bad.ok);
  EXPECT_EQ(bad.witness, (std::vector<std::int64_t>{1000, 1001}));
  EXPECT_TRUE(regularity_check(scenarios::gen_grid_metric(4, 4, 1), 1).ok);
}

TEST(GreedyCover, Examples) {
  const auto line = scenarios::line_metric(16);
  const auto cover = greedy_cover(line, 8, 4, 2);
  EXPECT_LE(cover.size(), 3u);
  for (std::size_t t : line.ball(8, 4)) {
    bool hit = false;
    for (std::size_t c : cover) hit = hit || line(c, t) <= 2;
    EXPECT_TRUE(hit) << t;
  }
  EXPECT_EQ(greedy_cover(line, 5, 0, 1), std::vector<std::size_t>{5});
  EXPECT_EQ(greedy_cover(line, 5, 3, 3).size(), 1u);
}

TEST(Construction, LineFullCoverage) {
  std::vector<std::pair<std::int64_t, Distance>> users;
  for (std::int64_t c = 0; c < 16; ++c) users.push_back({c, 8});
  const FlowGame g = line_game(16, users);
  const auto c = build_optimal_configuration(g, 1);
  const auto d = disseminate_expertise(g, c.config);
  for (std::size_t u = 0; u < g.n(); ++u) {
    EXPECT_EQ(utility_nearest(g, d, u), g.radius(u));
    EXPECT_LE(static_cast<std::int64_t>(c.config.follows(u).size()), c.degree_bound[u]);
  }
  // every received subject also has a monotone witnessing path
  const auto oracle_rows = oracle::path_enumeration(g, c.config, true);
  for (std::size_t u = 0; u < g.n(); ++u)
    for (std::size_t s = 0; s < g.p(); ++s)
      if (g.interested(u, s)) {
        EXPECT_TRUE(oracle_rows[u][s]);
      }
}

TEST(Construction, SmallRadiiUseDirectFollows) {
  const FlowGame g = line_game(6, {{0, 2}, {2, 2}, {4, 2}, {5, 2}});
  const auto c = build_optimal_configuration(g, 1);
  const auto rep = c.report;
  for (std::size_t u = 0; u < g.n(); ++u) {
    ASSERT_EQ(c.contacts[u].size(), 1u);
    for (Node v : c.config.follows(u)) EXPECT_FALSE(g.is_user(v));
    EXPECT_LE(c.config.follows(u).size(), rep.gamma * rep.delta);
  }
}

TEST(Construction, NestedBallInvariantOnGrids) {
  for (std::size_t side = 1; side <= 4; ++side) {
    const FlowGame g = scenarios::gen_grid_metric(side, static_cast<Distance>(side), 1);
    const auto c = build_optimal_configuration(g, 1);
    for (std::size_t u = 0; u < g.n(); ++u) {
      for (std::size_t i = 1; i < c.contacts[u].size(); ++i) {
        const Distance reach = std::min(g.radius(u), Distance(1) << (i + 1));
        const Distance prev = std::min(g.radius(u), Distance(1) << i);
        for (std::size_t s = 0; s < g.p(); ++s) {
          if (g.subject_distance(u, s) > reach) continue;
          bool ok = g.subject_distance(u, s) <= prev;
          for (Node v : c.contacts[u][i])
            ok = ok || g.subject_distance(v, s) <= std::min(g.radius(v), prev);
          EXPECT_TRUE(ok) << "side " << side << " user " << u << " level " << i + 1;
        }
      }
    }
    const auto d = disseminate_expertise(g, c.config);
    for (std::size_t u = 0; u < g.n(); ++u) EXPECT_EQ(utility_nearest(g, d, u), g.radius(u));
  }
  EXPECT_EQ(build_optimal_configuration(scenarios::gen_grid_metric(1, 1, 1), 1).config.edge_count(),
            1u);
}

TEST(Construction, RejectsIrregularAndUnderBudget) {
  EXPECT_THROW(build_optimal_configuration(line_game(8, {{0, 100}, {1, 1}}), 1), ConstructionError);
  std::vector<std::pair<std::int64_t, Distance>> users;
  for (std::int64_t c = 0; c < 16; ++c) users.push_back({c, 8});
  EXPECT_THROW(build_optimal_configuration(line_game(16, users, 2), 1), ConstructionError);
}

TEST(LogRatio, Values) {
  EXPECT_EQ(ceil_log2_ratio(1, 1), 0);
  EXPECT_EQ(ceil_log2_ratio(2, 1), 1);
  EXPECT_EQ(ceil_log2_ratio(3, 1), 2);
  EXPECT_EQ(ceil_log2_ratio(8, 1), 3);
  EXPECT_EQ(greedy_budget_bound(3, 3, 4, 1), 9 + 9 * 2);
}
