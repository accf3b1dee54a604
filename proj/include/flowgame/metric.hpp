#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flowgame/metric_space.hpp"
#include "flowgame/model.hpp"

namespace flowgame {

class ConstructionError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Ball covering

namespace detail {

/// Is `t` inside the ball around `c` of radius num/den?
inline bool within(const MetricSpace& d, std::size_t c, std::size_t t, Distance num, Distance den) {
  return d(c, t) * den <= num;
}

/// Greedy set cover of `targets` by balls of radius num/den centered at
/// any point (or only at the targets); each step takes the center covering
/// most uncovered targets, lowest index on ties.
inline std::vector<std::size_t> greedy_cover_points(const MetricSpace& d,
                                                    const std::vector<std::size_t>& targets,
                                                    Distance num, Distance den,
                                                    bool centers_in_targets = false) {
  std::vector<bool> covered(targets.size(), false);
  std::size_t remaining = targets.size();
  std::vector<std::size_t> centers;
  while (remaining > 0) {
    std::size_t best = 0, best_gain = 0;
    for (std::size_t c = 0; c < d.size(); ++c) {
      if (centers_in_targets && std::find(targets.begin(), targets.end(), c) == targets.end())
        continue;
      std::size_t gain = 0;
      for (std::size_t i = 0; i < targets.size(); ++i)
        if (!covered[i] && within(d, c, targets[i], num, den)) ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    // Every target covers itself, so best_gain >= 1.
    centers.push_back(best);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (!covered[i] && within(d, best, targets[i], num, den)) {
        covered[i] = true;
        --remaining;
      }
    }
  }
  return centers;
}

// Depth-bounded branch on the first uncovered target.
inline bool cover_within(const MetricSpace& d, const std::vector<std::size_t>& targets,
                         std::vector<int>& cover_count, Distance num, Distance den,
                         std::size_t budget) {
  std::size_t first = targets.size();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (cover_count[i] == 0) {
      first = i;
      break;
    }
  }
  if (first == targets.size()) return true;
  if (budget == 0) return false;
  for (std::size_t c = 0; c < d.size(); ++c) {
    if (!within(d, c, targets[first], num, den)) continue;
    for (std::size_t i = 0; i < targets.size(); ++i)
      if (within(d, c, targets[i], num, den)) ++cover_count[i];
    const bool ok = cover_within(d, targets, cover_count, num, den, budget - 1);
    for (std::size_t i = 0; i < targets.size(); ++i)
      if (within(d, c, targets[i], num, den)) --cover_count[i];
    if (ok) return true;
  }
  return false;
}

/// Minimum number of radius-num/den balls covering `targets`.
inline std::size_t exact_cover_size(const MetricSpace& d, const std::vector<std::size_t>& targets,
                                    Distance num, Distance den) {
  const std::size_t upper = greedy_cover_points(d, targets, num, den).size();
  std::vector<int> count(targets.size(), 0);
  for (std::size_t k = 0; k < upper; ++k)
    if (cover_within(d, targets, count, num, den, k)) return k;
  return upper;
}

}  // namespace detail

/// Centers (point indices, inside the ball) whose target_radius balls
/// cover B(center, R).
inline std::vector<std::size_t> greedy_cover(const MetricSpace& space, std::size_t center,
                                             Distance radius, Distance target_radius) {
  if (radius < 0 || target_radius < 0) throw PreconditionError("greedy_cover: negative radius");
  return detail::greedy_cover_points(space, space.ball(center, radius), target_radius, 1, true);
}

// ---------------------------------------------------------------------------
// Structural properties

enum class DoublingMethod { exact, greedy };

struct DoublingResult {
  std::size_t gamma = 1;
  DoublingMethod method = DoublingMethod::greedy;
  // A ball attaining gamma.
  std::size_t witness_center = 0;
  Distance witness_radius = 0;
};

/// Max over balls B(s, R), R a realized distance, of the number of radius
/// R/2 balls needed to cover it. Greedy gives a certified upper bound.
inline DoublingResult doubling_constant(const MetricSpace& space, DoublingMethod method,
                                        std::size_t exact_cap = 32) {
  if (method == DoublingMethod::exact && space.size() > exact_cap)
    throw CapExceeded("doubling_constant: exact method limited to " + std::to_string(exact_cap) +
                      " points");
  DoublingResult out;
  out.method = method;
  if (space.size() == 0) return out;
  for (Distance radius : space.distinct_distances()) {
    for (std::size_t s = 0; s < space.size(); ++s) {
      const auto ball = space.ball(s, radius);
      const std::size_t k = method == DoublingMethod::greedy
                                ? detail::greedy_cover_points(space, ball, radius, 2).size()
                                : detail::exact_cover_size(space, ball, radius, 2);
      if (k > out.gamma) {
        out.gamma = k;
        out.witness_center = s;
        out.witness_radius = radius;
      }
    }
  }
  return out;
}

struct PropertyCheck {
  bool ok = true;
  // External ids of the offending subject / users; empty when ok.
  std::vector<std::int64_t> witness;
};

/// Every subject lies within r of the center of some user with R_u >= r.
inline PropertyCheck covering_radius_check(const FlowGame& game, Distance r) {
  const auto& d = game.metric();
  for (std::size_t s = 0; s < game.p(); ++s) {
    bool covered = false;
    for (std::size_t u = 0; u < game.n() && !covered; ++u)
      covered = game.radius(u) >= r && d(game.center_point(u), game.producer_point(s)) <= r;
    if (!covered) return {false, {game.producers()[s].value}};
  }
  return {};
}

/// max over points x of |B(x, r) ∩ subjects|.
inline std::size_t sparsity(const MetricSpace& space, const std::vector<std::size_t>& subjects,
                            Distance r) {
  std::size_t best = 0;
  for (std::size_t x = 0; x < space.size(); ++x) {
    std::size_t count = 0;
    for (std::size_t s : subjects)
      if (space(x, s) <= r) ++count;
    best = std::max(best, count);
  }
  return best;
}

inline std::vector<std::size_t> subject_points(const FlowGame& game) {
  std::vector<std::size_t> pts;
  for (std::size_t s = 0; s < game.p(); ++s) pts.push_back(game.producer_point(s));
  return pts;
}

inline std::size_t sparsity(const FlowGame& game, Distance r) {
  return sparsity(game.metric(), subject_points(game), r);
}

/// For distinct users u, v: d(s_u, s_v) < 3R_u/2 + r implies R_v >= R_u/2 + r.
/// Compared on doubled integers.
inline PropertyCheck regularity_check(const FlowGame& game, Distance r) {
  const auto& d = game.metric();
  for (std::size_t u = 0; u < game.n(); ++u) {
    for (std::size_t v = 0; v < game.n(); ++v) {
      if (u == v) continue;
      const Distance duv = d(game.center_point(u), game.center_point(v));
      const Distance ru = game.radius(u), rv = game.radius(v);
      if (2 * duv < 3 * ru + 2 * r && 2 * rv < ru + 2 * r)
        return {false, {game.user(u).id.value, game.user(v).id.value}};
    }
  }
  return {};
}

struct StructureReport {
  std::size_t gamma = 1;
  DoublingMethod gamma_method = DoublingMethod::greedy;
  Distance r = 0;
  std::size_t delta = 0;
  PropertyCheck covering;
  PropertyCheck regularity;

  bool ok() const { return covering.ok && regularity.ok; }
};

inline StructureReport structure_report(const FlowGame& game, Distance r,
                                        DoublingMethod method = DoublingMethod::greedy) {
  if (!game.has_metric_interests())
    throw PreconditionError("structure_report: needs a metric game");
  StructureReport rep;
  const auto dbl = doubling_constant(game.metric(), method);
  rep.gamma = dbl.gamma;
  rep.gamma_method = dbl.method;
  rep.r = r;
  rep.delta = sparsity(game, r);
  rep.covering = covering_radius_check(game, r);
  rep.regularity = regularity_check(game, r);
  return rep;
}

// ---------------------------------------------------------------------------
// Optimal construction

/// Smallest L >= 0 with r * 2^L >= R.
inline int ceil_log2_ratio(Distance radius, Distance r) {
  int levels = 0;
  Distance reach = r;
  while (reach < radius) {
    reach *= 2;
    ++levels;
  }
  return levels;
}

/// Link budget the greedy construction is certified against:
/// gamma * delta + gamma^2 * ceil(log2(R_u / r)).
inline std::int64_t greedy_budget_bound(std::size_t gamma, std::size_t delta, Distance radius,
                                        Distance r) {
  const auto g = static_cast<std::int64_t>(gamma);
  return g * static_cast<std::int64_t>(delta) + g * g * ceil_log2_ratio(radius, r);
}

struct Construction {
  Configuration config;
  StructureReport report;
  /// contacts[u][i - 1] = N_{u,i} as nodes (producers at level 1, users above).
  std::vector<std::vector<Strategy>> contacts;
  /// Per-user certified in-degree bound.
  std::vector<std::int64_t> degree_bound;
};

/// Multi-scale follow sets: level 1 follows every producer within
/// min(R_u, 2r); level i >= 2 covers B(s_u, min(R_u, 2^i r)) by greedy
/// balls of radius 2^(i-2) r and follows, for each cover center, the nearest
/// other user whose center is within r. Throws when the structural
/// properties fail or a budget is too small.
inline Construction build_optimal_configuration(const FlowGame& game, Distance r) {
  if (r < 1) throw PreconditionError("build_optimal_configuration: r must be >= 1");
  Construction out;
  out.report = structure_report(game, r);
  if (!out.report.covering.ok)
    throw ConstructionError("covering radius fails at subject " +
                            std::to_string(out.report.covering.witness.at(0)));
  if (!out.report.regularity.ok)
    throw ConstructionError("interest-radius regularity fails for users " +
                            std::to_string(out.report.regularity.witness.at(0)) + ", " +
                            std::to_string(out.report.regularity.witness.at(1)));

  const auto& d = game.metric();
  auto level_radius = [&](std::size_t u, int i) {
    return std::min(game.radius(u), r << i);
  };
  auto subjects_in = [&](std::size_t u, Distance radius) {
    std::vector<std::size_t> pts;
    for (std::size_t s = 0; s < game.p(); ++s)
      if (game.subject_distance(u, s) <= radius) pts.push_back(s);
    return pts;
  };

  out.config = Configuration(game.n());
  out.contacts.resize(game.n());
  out.degree_bound.resize(game.n());
  for (std::size_t u = 0; u < game.n(); ++u) {
    const int levels = std::max(1, ceil_log2_ratio(game.radius(u), r));
    Strategy level1;
    for (std::size_t s : subjects_in(u, level_radius(u, 1))) level1.push_back(game.producer_node(s));
    out.contacts[u].push_back(level1);

    for (int i = 2; i <= levels; ++i) {
      const Distance reach = level_radius(u, i);
      const Distance quarter = r << (i - 2);
      std::vector<std::size_t> targets;
      for (std::size_t s : subjects_in(u, reach)) targets.push_back(game.producer_point(s));
      Strategy level;
      for (std::size_t c : detail::greedy_cover_points(d, targets, quarter, 1)) {
        std::optional<std::size_t> snap;
        for (std::size_t v = 0; v < game.n(); ++v) {
          if (game.radius(v) < r || d(c, game.center_point(v)) > r) continue;
          if (!snap || d(c, game.center_point(v)) < d(c, game.center_point(*snap))) snap = v;
        }
        if (!snap) throw ConstructionError("no user center within r of a cover center");
        // Snapping to u itself: that part is already inside B_{u,i-1}.
        if (*snap != u) level.push_back(static_cast<Node>(*snap));
      }
      std::sort(level.begin(), level.end());
      level.erase(std::unique(level.begin(), level.end()), level.end());

      // B_{u,i} ⊆ B_{u,i-1} ∪ ⋃_{v ∈ N_{u,i}} B_{v,i-1}
      for (std::size_t s : subjects_in(u, reach)) {
        bool ok = game.subject_distance(u, s) <= level_radius(u, i - 1);
        for (std::size_t k = 0; k < level.size() && !ok; ++k)
          ok = game.subject_distance(level[k], s) <= level_radius(level[k], i - 1);
        if (!ok)
          throw ConstructionError("nested-ball cover fails for user " +
                                  std::to_string(game.user(u).id.value) + " at level " +
                                  std::to_string(i));
      }
      out.contacts[u].push_back(std::move(level));
    }

    Strategy all;
    for (const auto& level : out.contacts[u]) all.insert(all.end(), level.begin(), level.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    out.degree_bound[u] = greedy_budget_bound(out.report.gamma, out.report.delta, game.radius(u), r);
    if (all.size() > static_cast<std::size_t>(game.budget(u)))
      throw ConstructionError("budget of user " + std::to_string(game.user(u).id.value) + " (" +
                              std::to_string(game.budget(u)) + ") is below the " +
                              std::to_string(all.size()) + " links the construction needs");
    out.config.set_strategy(game, u, std::move(all));
  }
  return out;
}

}  // namespace flowgame
