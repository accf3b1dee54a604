#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "flowgame/dynamics.hpp"
#include "flowgame/metric.hpp"
#include "flowgame/model.hpp"

namespace flowgame::scenarios {

namespace detail {

inline UserSpec uniform_user(std::int64_t id, int budget, const std::vector<SubjectId>& subjects,
                             Value w = 1) {
  UserSpec u{UserId{id}, budget, {}, std::nullopt};
  for (auto s : subjects) u.weights[s.value] = w;
  return u;
}

inline std::vector<SubjectId> id_range(std::int64_t first, std::size_t count) {
  std::vector<SubjectId> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(SubjectId{first + static_cast<std::int64_t>(i)});
  return out;
}

inline Node node(const FlowGame& g, std::int64_t id) { return g.node_of(id).value(); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Doubly linked chain vs oriented ring (homogeneous, budget 2, p = n)

struct ChainVsRing {
  FlowGame game;
  Configuration chain;
  Configuration ring;
};

/// Users 0..n-1, producers n..2n-1 (producer n+i is "user i's own").
inline ChainVsRing gen_chain_vs_ring(std::size_t n) {
  if (n < 2) throw PreconditionError("gen_chain_vs_ring: n must be >= 2");
  const auto producers = detail::id_range(static_cast<std::int64_t>(n), n);
  std::vector<UserSpec> users;
  for (std::size_t i = 0; i < n; ++i)
    users.push_back(detail::uniform_user(static_cast<std::int64_t>(i), 2, producers));
  FlowGame game(1, producers, users);

  Configuration chain(n), ring(n);
  const auto own = [&](std::size_t i) { return game.producer_node(i); };
  for (std::size_t i = 0; i < n; ++i) {
    Strategy s;
    if (i == 0) s = {own(0), Node(1)};
    else if (i == n - 1) s = {own(n - 1), Node(n - 2)};
    else s = {Node(i - 1), Node(i + 1)};
    chain.set_strategy(game, i, s);
    ring.set_strategy(game, i, {Node((i + n - 1) % n), own(i)});
  }
  return {std::move(game), std::move(chain), std::move(ring)};
}

// ---------------------------------------------------------------------------
// Strategy-space 4-cycle: u in {A, B}, v in {C, D}

struct FourCycle {
  FlowGame game;
  std::size_t u = 0, v = 1;
  Strategy A, B, C, D;

  Configuration state(const Strategy& su, const Strategy& sv) const {
    Configuration c(game.n());
    c.set_strategy(game, u, su);
    c.set_strategy(game, v, sv);
    return c;
  }
};

/// Producers a, b, c, d (ids 2..5); users u (id 0, budget 2), v (id 1, budget 3).
inline FourCycle gen_four_cycle_game() {
  const auto producers = detail::id_range(2, 4);
  FlowGame game(1, producers,
                {detail::uniform_user(0, 2, producers), detail::uniform_user(1, 3, producers)});
  const Node a = detail::node(game, 2), b = detail::node(game, 3), c = detail::node(game, 4),
             d = detail::node(game, 5);
  const Node u = detail::node(game, 0);
  return FourCycle{game, 0, 1, {a}, {b, c}, {u, b, c}, {u, d}};
}

// ---------------------------------------------------------------------------
// Heterogeneous interests with unbounded price of anarchy

struct HetPoa {
  FlowGame game;
  Configuration benchmark;
  Configuration equilibrium;
  std::size_t k = 0;
  int delta = 0;
};

/// Users a_1..a_k (ids 0..k-1) and b_1..b_k (ids k..2k-1), budget delta.
/// Producer groups A_i and B_i hold delta-1 subjects each. a_i values
/// A_i ∪ B_i plus the first subject of every other A_j; b_i symmetrically
/// with the B_j.
inline HetPoa gen_het_poa(std::size_t k, int delta) {
  if (k < 2 || delta < 2) throw PreconditionError("gen_het_poa: needs k >= 2 and delta >= 2");
  const auto group = static_cast<std::size_t>(delta - 1);
  const auto n = static_cast<std::int64_t>(2 * k);
  auto a_group = [&](std::size_t i) { return detail::id_range(n + static_cast<std::int64_t>(i * group), group); };
  auto b_group = [&](std::size_t i) {
    return detail::id_range(n + static_cast<std::int64_t>((k + i) * group), group);
  };
  const auto producers = detail::id_range(n, 2 * k * group);

  std::vector<UserSpec> users;
  for (int side = 0; side < 2; ++side) {
    for (std::size_t i = 0; i < k; ++i) {
      UserSpec u{UserId{static_cast<std::int64_t>(side * k + i)}, delta, {}, std::nullopt};
      for (auto s : a_group(i)) u.weights[s.value] = 1;
      for (auto s : b_group(i)) u.weights[s.value] = 1;
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) u.weights[(side == 0 ? a_group(j) : b_group(j)).front().value] = 1;
      users.push_back(std::move(u));
    }
  }
  FlowGame game(1, producers, users);

  Configuration bench(game.n()), eq(game.n());
  auto nodes_of = [&](const std::vector<SubjectId>& ids) {
    Strategy s;
    for (auto id : ids) s.push_back(detail::node(game, id.value));
    return s;
  };
  for (std::size_t i = 0; i < k; ++i) {
    const Node a = Node(i), b = Node(k + i);
    Strategy sa = nodes_of(a_group(i)), sb = nodes_of(b_group(i));
    Strategy ra = sa, rb = sb;
    ra.push_back(Node((i + k - 1) % k));
    rb.push_back(Node(k + (i + k - 1) % k));
    bench.set_strategy(game, a, ra);
    bench.set_strategy(game, b, rb);
    sa.push_back(b);
    sb.push_back(a);
    eq.set_strategy(game, a, sa);
    eq.set_strategy(game, b, sb);
  }
  return {std::move(game), std::move(bench), std::move(eq), k, delta};
}

// ---------------------------------------------------------------------------
// Non-convergent heterogeneous dynamics

struct Instability {
  FlowGame game;
  Configuration initial;
  /// Third-slot alternatives: u1 picks q1 or r1, u2 picks q2 or r2.
  std::map<std::size_t, std::vector<Strategy>> candidates;
  std::size_t u1 = 0, u2 = 0;
  Node q1 = 0, r1 = 0, q2 = 0, r2 = 0;
};

/// Relay users publish two topics each (modelled as users following two
/// producers they value fully): p1:{a,b} p2:{c,d} q1:{x,y} r1:{k,l}
/// q2:{x,k} r2:{y,l}. u1, u2 have budget 3 and the tabulated values
/// (scale 100, epsilon = 1 tick); u_i follows p_i and the other u.
inline Instability gen_instability() {
  constexpr Value unit = 100, eps = 1;
  enum : std::int64_t { a = 101, b, c, d, x, y, k, l };
  enum : std::int64_t { U1 = 1, U2 = 2, P1 = 11, P2, Q1, R1, Q2, R2 };
  const auto producers = detail::id_range(a, 8);

  auto relay = [&](std::int64_t id, std::int64_t s, std::int64_t t) {
    return UserSpec{UserId{id}, 2, {{s, unit}, {t, unit}}, std::nullopt};
  };
  std::vector<UserSpec> users{
      UserSpec{UserId{U1}, 3,
               {{a, 2 * unit}, {b, 2 * unit}, {c, 2 * unit}, {d, 0}, {x, eps}, {y, unit},
                {k, unit}, {l, eps}},
               std::nullopt},
      UserSpec{UserId{U2}, 3,
               {{a, 2 * unit}, {b, 0}, {c, 2 * unit}, {d, 2 * unit}, {x, unit}, {y, eps},
                {k, eps}, {l, unit}},
               std::nullopt},
      relay(P1, a, b), relay(P2, c, d), relay(Q1, x, y),
      relay(R1, k, l), relay(Q2, x, k), relay(R2, y, l)};
  FlowGame game(unit, producers, users);

  auto nd = [&](std::int64_t id) { return detail::node(game, id); };
  Instability out{game, Configuration(game.n()), {}};
  out.u1 = nd(U1);
  out.u2 = nd(U2);
  out.q1 = nd(Q1);
  out.r1 = nd(R1);
  out.q2 = nd(Q2);
  out.r2 = nd(R2);
  const std::pair<std::int64_t, std::pair<std::int64_t, std::int64_t>> wiring[] = {
      {P1, {a, b}}, {P2, {c, d}}, {Q1, {x, y}}, {R1, {k, l}}, {Q2, {x, k}}, {R2, {y, l}}};
  for (const auto& [relay_id, topics] : wiring)
    out.initial.set_strategy(game, nd(relay_id), {nd(topics.first), nd(topics.second)});
  out.initial.set_strategy(game, out.u1, {nd(P1), nd(U2), out.q1});
  out.initial.set_strategy(game, out.u2, {nd(P2), nd(U1), out.q2});
  out.candidates[out.u1] = {{nd(P1), nd(U2), out.q1}, {nd(P1), nd(U2), out.r1}};
  out.candidates[out.u2] = {{nd(P2), nd(U1), out.q2}, {nd(P2), nd(U1), out.r2}};
  for (auto& [user, alts] : out.candidates)
    for (auto& s : alts) std::sort(s.begin(), s.end());
  return out;
}

// ---------------------------------------------------------------------------
// Metric families

/// L1 grid of side x side points (ids 0..side^2-1, row-major).
inline MetricSpace grid_metric(std::size_t side) {
  std::vector<std::int64_t> points;
  std::vector<std::vector<Distance>> matrix;
  const std::size_t count = side * side;
  for (std::size_t i = 0; i < count; ++i) {
    points.push_back(static_cast<std::int64_t>(i));
    std::vector<Distance> row;
    for (std::size_t j = 0; j < count; ++j) {
      const auto dx = std::abs(static_cast<Distance>(i / side) - static_cast<Distance>(j / side));
      const auto dy = std::abs(static_cast<Distance>(i % side) - static_cast<Distance>(j % side));
      row.push_back(dx + dy);
    }
    matrix.push_back(std::move(row));
  }
  return MetricSpace(std::move(points), std::move(matrix));
}

/// d(i, j) = |i - j| on points 0..count-1.
inline MetricSpace line_metric(std::size_t count, std::int64_t first = 0) {
  std::vector<std::int64_t> points;
  std::vector<std::vector<Distance>> matrix(count, std::vector<Distance>(count));
  for (std::size_t i = 0; i < count; ++i) {
    points.push_back(first + static_cast<std::int64_t>(i));
    for (std::size_t j = 0; j < count; ++j)
      matrix[i][j] = std::abs(static_cast<Distance>(i) - static_cast<Distance>(j));
  }
  return MetricSpace(std::move(points), std::move(matrix));
}

/// Subject at every grid point and one user per point (ids side^2 + i)
/// with radius R. Budgets are the greedy-certified construction bound.
inline FlowGame gen_grid_metric(std::size_t side, Distance radius, Distance r) {
  if (side < 1) throw PreconditionError("gen_grid_metric: side must be >= 1");
  MetricSpace metric = grid_metric(side);
  const std::size_t count = side * side;
  std::vector<std::size_t> all(count);
  for (std::size_t i = 0; i < count; ++i) all[i] = i;
  const auto gamma = doubling_constant(metric, DoublingMethod::greedy).gamma;
  const auto delta = sparsity(metric, all, r);
  const auto budget = static_cast<int>(greedy_budget_bound(gamma, delta, radius, r));

  std::vector<UserSpec> users;
  for (std::size_t i = 0; i < count; ++i)
    users.push_back(UserSpec{UserId{static_cast<std::int64_t>(count + i)}, budget, {},
                             MetricInterest{static_cast<std::int64_t>(i), radius}});
  return FlowGame(1, detail::id_range(0, count), users, std::move(metric),
                  FilterMode::expertise_filtered, UtilityMode::nearest_subject);
}

// ---------------------------------------------------------------------------
// Seeded random families

/// Uniform draw in [lo, hi], identical across standard libraries.
inline std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(
                  flowgame::detail::bounded(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

/// Homogeneous game: users 0..n-1, producers n..n+p-1, budgets in
/// [min_budget, max_budget].
inline FlowGame gen_random_homogeneous(std::size_t n, std::size_t p, int min_budget,
                                       int max_budget, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto producers = detail::id_range(static_cast<std::int64_t>(n), p);
  std::vector<UserSpec> users;
  for (std::size_t i = 0; i < n; ++i)
    users.push_back(detail::uniform_user(static_cast<std::int64_t>(i),
                                         static_cast<int>(uniform(rng, min_budget, max_budget)),
                                         producers));
  return FlowGame(1, producers, users);
}

/// Arbitrary weights in [0, max_weight]; every subject is valued by someone.
inline FlowGame gen_random_weighted(std::size_t n, std::size_t p, int max_budget, Value max_weight,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto producers = detail::id_range(static_cast<std::int64_t>(n), p);
  std::vector<UserSpec> users;
  for (std::size_t i = 0; i < n; ++i) {
    UserSpec u{UserId{static_cast<std::int64_t>(i)}, static_cast<int>(uniform(rng, 1, max_budget)),
               {}, std::nullopt};
    for (auto s : producers) u.weights[s.value] = uniform(rng, 0, 1) ? uniform(rng, 1, max_weight) : 0;
    users.push_back(std::move(u));
  }
  for (auto s : producers) {
    bool valued = false;
    for (const auto& u : users) valued = valued || u.weights.at(s.value) > 0;
    if (!valued) users[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(n) - 1))]
                     .weights[s.value] = 1;
  }
  return FlowGame(1, producers, users);
}

/// Metric game on a line: p subjects at distinct random positions in
/// [0, span), n users centered on random subjects with radii in
/// [1, max_radius]; radii grow until every subject is inside some ball.
inline FlowGame gen_random_metric(std::size_t n, std::size_t p, int max_budget,
                                  Distance max_radius, std::uint64_t seed,
                                  std::int64_t span = 12) {
  std::mt19937_64 rng(seed);
  std::vector<std::int64_t> positions;
  while (positions.size() < p) {
    const auto x = uniform(rng, 0, span - 1);
    if (std::find(positions.begin(), positions.end(), x) == positions.end()) positions.push_back(x);
  }
  std::sort(positions.begin(), positions.end());
  std::vector<std::vector<Distance>> matrix(p, std::vector<Distance>(p));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) matrix[i][j] = std::abs(positions[i] - positions[j]);
  const auto subject_ids = detail::id_range(static_cast<std::int64_t>(n), p);
  std::vector<std::int64_t> point_ids;
  for (auto s : subject_ids) point_ids.push_back(s.value);

  std::vector<UserSpec> users;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(p) - 1));
    users.push_back(UserSpec{UserId{static_cast<std::int64_t>(i)},
                             static_cast<int>(uniform(rng, 1, max_budget)),
                             {},
                             MetricInterest{point_ids[c], uniform(rng, 1, max_radius)}});
  }
  for (std::size_t s = 0; s < p; ++s) {
    std::size_t nearest = 0;
    Distance best = -1;
    bool covered = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(users[i].ball->center - point_ids[0]);
      const Distance dist = matrix[c][s];
      covered = covered || dist <= users[i].ball->radius;
      if (best < 0 || dist < best) {
        best = dist;
        nearest = i;
      }
    }
    if (!covered) users[nearest].ball->radius = best;
  }
  return FlowGame(1, subject_ids, users, MetricSpace(point_ids, matrix),
                  FilterMode::expertise_filtered, UtilityMode::nearest_subject);
}

/// Each user follows a random subset of at most its budget.
inline Configuration random_configuration(const FlowGame& game, std::mt19937_64& rng) {
  Configuration config(game.n());
  for (std::size_t u = 0; u < game.n(); ++u) {
    const auto size = static_cast<std::size_t>(uniform(rng, 0, game.budget(u)));
    Strategy pool;
    for (Node v = 0; v < game.node_count(); ++v)
      if (v != u) pool.push_back(v);
    Strategy pick;
    for (std::size_t i = 0; i < size && !pool.empty(); ++i) {
      const auto j = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(pool.size()) - 1));
      pick.push_back(pool[j]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
    }
    config.set_strategy(game, u, std::move(pick));
  }
  return config;
}

}  // namespace flowgame::scenarios
