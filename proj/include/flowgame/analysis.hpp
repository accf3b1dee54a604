#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "flowgame/dynamics.hpp"
#include "flowgame/model.hpp"
#include "flowgame/propagation.hpp"

namespace flowgame {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& q) {
  return q.denominator() == 1
             ? std::to_string(q.numerator())
             : std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

inline double to_double(const Rational& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

// ---------------------------------------------------------------------------
// Equilibria and welfare

struct EquilibriumReport {
  bool is_equilibrium = true;
  std::optional<Move> witness;
  Certification certification = Certification::exhaustive;
};

/// Pure Nash check under `search`: the first user with an improving move
/// (in index order) becomes the witness.
inline EquilibriumReport is_equilibrium(const FlowGame& game, const Configuration& config,
                                        const SearchOptions& search = {}) {
  validate(game, config);
  EquilibriumReport rep;
  rep.certification = certification_of(search.mode);
  for (std::size_t u = 0; u < game.n(); ++u) {
    if (auto m = improving_move(game, config, u, search)) {
      rep.is_equilibrium = false;
      rep.witness = std::move(m);
      break;
    }
  }
  return rep;
}

inline std::vector<Value> user_utilities(const FlowGame& game, const Configuration& config) {
  const Dissemination d = disseminate_active(game, config);
  std::vector<Value> out(game.n());
  for (std::size_t u = 0; u < game.n(); ++u) out[u] = active_utility(game, d[u], u);
  return out;
}

/// Sum of utilities under the active utility mode (ticks or radii).
inline Value global_welfare(const FlowGame& game, const Configuration& config) {
  Value total = 0;
  for (Value v : user_utilities(game, config)) total += v;
  return total;
}

// ---------------------------------------------------------------------------
// Homogeneous benchmark

inline std::int64_t total_budget(const FlowGame& game) {
  std::int64_t total = 0;
  for (const auto& u : game.users()) total += u.budget;
  return total;
}

/// Mean budget as an exact fraction.
inline Rational mean_budget(const FlowGame& game) {
  return Rational(total_budget(game), static_cast<std::int64_t>(game.n()));
}

struct UpperBound {
  Rational value;
  /// True for min(p, n(mean-1)); false for the cruder min(p, n*mean) used
  /// outside the all-budgets-below-p, two-users-with-budget-2 regime.
  bool improved = true;
};

inline bool in_ring_regime(const FlowGame& game) {
  std::size_t wide = 0;
  for (const auto& u : game.users())
    if (u.budget >= 2) ++wide;
  return wide >= 2;
}

/// Best per-user utility (in subjects) any configuration can give.
inline UpperBound homogeneous_upper_bound(const FlowGame& game) {
  if (!game.is_homogeneous()) throw PreconditionError("homogeneous_upper_bound: not homogeneous");
  const auto p = static_cast<std::int64_t>(game.p());
  const auto n = static_cast<std::int64_t>(game.n());
  const bool below_p = std::all_of(game.users().begin(), game.users().end(),
                                   [&](const UserSpec& u) { return u.budget < p; });
  if (below_p && in_ring_regime(game)) {
    const Rational ring = Rational(n) * (mean_budget(game) - 1);
    return {std::min(Rational(p), ring), true};
  }
  return {std::min(Rational(p), Rational(n) * mean_budget(game)), false};
}

/// Oriented ring over budget >= 2 users (each follows its predecessor),
/// budget-1 users follow the first ring member, and leftover budget follows
/// distinct producers, lowest ids first.
inline Configuration homogeneous_benchmark(const FlowGame& game) {
  if (!game.is_homogeneous()) throw PreconditionError("homogeneous_benchmark: not homogeneous");
  if (!in_ring_regime(game))
    throw PreconditionError("homogeneous_benchmark: needs two users with budget >= 2");
  std::vector<std::size_t> ring;
  for (std::size_t u = 0; u < game.n(); ++u)
    if (game.budget(u) >= 2) ring.push_back(u);

  Configuration config(game.n());
  std::size_t next_producer = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const std::size_t u = ring[i];
    Strategy s{static_cast<Node>(ring[(i + ring.size() - 1) % ring.size()])};
    for (int k = 1; k < game.budget(u) && next_producer < game.p(); ++k)
      s.push_back(game.producer_node(next_producer++));
    config.set_strategy(game, u, std::move(s));
  }
  for (std::size_t u = 0; u < game.n(); ++u)
    if (game.budget(u) == 1) config.set_strategy(game, u, {static_cast<Node>(ring.front())});
  return config;
}

/// benchmark / worst sampled equilibrium. A lower bound on the true price of
/// anarchy unless both sides are known extremes.
inline Rational poa_ratio(const std::vector<Value>& equilibrium_welfares, Value benchmark_welfare) {
  if (equilibrium_welfares.empty()) throw PreconditionError("poa_ratio: no equilibria given");
  const Value worst = *std::min_element(equilibrium_welfares.begin(), equilibrium_welfares.end());
  if (worst <= 0) throw PreconditionError("poa_ratio: worst equilibrium has zero welfare");
  return Rational(benchmark_welfare, worst);
}

// ---------------------------------------------------------------------------
// Graph structure

/// Directed multigraph on nodes [0, nodes).
struct Digraph {
  std::size_t nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
};

namespace detail {

inline bool reaches_without(const Digraph& g, std::size_t from, std::size_t to,
                            std::size_t skipped_arc) {
  if (from == to) return true;
  std::vector<std::vector<std::size_t>> out(g.nodes);
  for (std::size_t e = 0; e < g.arcs.size(); ++e)
    if (e != skipped_arc) out[g.arcs[e].first].push_back(g.arcs[e].second);
  std::vector<bool> seen(g.nodes, false);
  std::vector<std::size_t> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w : out[v]) {
      if (w == to) return true;
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return false;
}

}  // namespace detail

/// Index of an arc (s, t) for which another directed s -> t path exists
/// (a self-loop counts via the empty path), or none.
inline std::optional<std::size_t> find_transitivity_arc(const Digraph& g) {
  for (std::size_t e = 0; e < g.arcs.size(); ++e)
    if (detail::reaches_without(g, g.arcs[e].first, g.arcs[e].second, e)) return e;
  return std::nullopt;
}

/// Tarjan's algorithm; component ids are in reverse topological order.
inline std::vector<std::size_t> strongly_connected_components(const Digraph& g) {
  std::vector<std::vector<std::size_t>> out(g.nodes);
  for (const auto& [a, b] : g.arcs) out[a].push_back(b);
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(g.nodes, unvisited), low(g.nodes, 0), comp(g.nodes, unvisited);
  std::vector<bool> on_stack(g.nodes, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0, components = 0;

  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : out[v]) {
      if (index[w] == unvisited) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = components;
      } while (w != v);
      ++components;
    }
  };
  for (std::size_t v = 0; v < g.nodes; ++v)
    if (index[v] == unvisited) visit(v);
  return comp;
}

/// User-to-user follow graph: arc v -> w when w follows v.
inline Digraph user_graph(const FlowGame& game, const Configuration& config) {
  Digraph g{game.n(), {}};
  for (std::size_t w = 0; w < game.n(); ++w)
    for (Node v : config.follows(w))
      if (game.is_user(v)) g.arcs.emplace_back(v, w);
  return g;
}

struct StructureCheck {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Structural consequences of equilibrium in homogeneous games with
/// budgets >= 3: (a) whenever x -> u_1 -> ... -> u_k with u_k missing a
/// subject, u_k reaches back to u_1; (b) inside a strongly connected set of
/// deficient users no arc is transitive and no producer is followed twice.
inline StructureCheck equilibrium_structure_check(const FlowGame& game,
                                                  const Configuration& config) {
  if (!game.is_homogeneous())
    throw PreconditionError("equilibrium_structure_check: not homogeneous");
  for (const auto& u : game.users())
    if (u.budget < 3) throw PreconditionError("equilibrium_structure_check: budgets must be >= 3");

  const Dissemination d = disseminate(game, config);
  const Digraph g = user_graph(game, config);
  auto deficient = [&](std::size_t u) { return d[u].count() < game.p(); };
  auto id = [&](std::size_t u) { return std::to_string(game.user(u).id.value); };

  std::vector<std::vector<bool>> reach(game.n(), std::vector<bool>(game.n(), false));
  {
    std::vector<std::vector<std::size_t>> out(game.n());
    for (const auto& [a, b] : g.arcs) out[a].push_back(b);
    for (std::size_t s = 0; s < game.n(); ++s) {
      std::vector<std::size_t> stack{s};
      reach[s][s] = true;
      while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w : out[v])
          if (!reach[s][w]) {
            reach[s][w] = true;
            stack.push_back(w);
          }
      }
    }
  }

  StructureCheck rep;
  for (std::size_t u1 = 0; u1 < game.n(); ++u1) {
    const auto& f = config.follows(u1);
    if (std::none_of(f.begin(), f.end(), [&](Node v) { return !game.is_user(v); })) continue;
    for (std::size_t uk = 0; uk < game.n(); ++uk) {
      if (reach[u1][uk] && deficient(uk) && !reach[uk][u1])
        rep.violations.push_back("deficient user " + id(uk) + " is fed by producer-follower " +
                                 id(u1) + " but has no path back");
    }
  }

  const auto comp = strongly_connected_components(g);
  const std::size_t components = game.n() == 0 ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  for (std::size_t c = 0; c < components; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t u = 0; u < game.n(); ++u)
      if (comp[u] == c) members.push_back(u);
    if (members.size() < 2 ||
        !std::all_of(members.begin(), members.end(), [&](std::size_t u) { return deficient(u); }))
      continue;
    std::vector<std::size_t> local(game.n(), members.size());
    for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = i;
    Digraph sub{members.size(), {}};
    for (const auto& [a, b] : g.arcs)
      if (comp[a] == c && comp[b] == c) sub.arcs.emplace_back(local[a], local[b]);
    if (auto e = find_transitivity_arc(sub))
      rep.violations.push_back("transitivity arc " + id(members[sub.arcs[*e].first]) + " -> " +
                               id(members[sub.arcs[*e].second]) +
                               " inside a deficient component");
    std::vector<int> followers(game.p(), 0);
    for (std::size_t u : members)
      for (Node v : config.follows(u))
        if (!game.is_user(v) && ++followers[game.subject_of(v)] == 2)
          rep.violations.push_back("producer " +
                                   std::to_string(game.producers()[game.subject_of(v)].value) +
                                   " followed twice inside a deficient component");
  }
  rep.ok = rep.violations.empty();
  return rep;
}

}  // namespace flowgame
