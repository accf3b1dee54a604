#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "flowgame/model.hpp"

namespace flowgame {

/// Received subjects per user (producers are not keys).
struct Dissemination {
  std::vector<SubjectSet> received;
  const SubjectSet& operator[](std::size_t u) const { return received[u]; }
  bool operator==(const Dissemination&) const = default;
};

namespace detail {

/// Does user `from` forward subject `s` to user `to`, given `from` has it?
inline bool relays(const FlowGame& game, bool expertise, std::size_t from, std::size_t to,
                   std::size_t s) {
  if (!game.interested(from, s)) return false;
  return !expertise || game.subject_distance(from, s) <= game.subject_distance(to, s);
}

// Per-subject BFS from the producer. Edges leave a user only when the
// active relay rule allows; `excluded` (if set) is removed from the graph.
inline Dissemination spread(const FlowGame& game, const Configuration& config, bool expertise,
                            std::optional<std::size_t> excluded = std::nullopt) {
  const std::size_t n = game.n();
  std::vector<std::vector<std::size_t>> followers(game.node_count());
  for (std::size_t u = 0; u < n; ++u) {
    if (excluded && *excluded == u) continue;
    for (Node v : config.follows(u)) {
      if (excluded && v == *excluded) continue;
      followers[v].push_back(u);
    }
  }

  Dissemination out{std::vector<SubjectSet>(n, SubjectSet(game.p()))};
  std::vector<std::size_t> queue;
  queue.reserve(n);
  for (std::size_t s = 0; s < game.p(); ++s) {
    queue.clear();
    for (std::size_t w : followers[game.producer_node(s)]) {
      if (!out.received[w].test(s)) {
        out.received[w].set(s);
        queue.push_back(w);
      }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t v = queue[head];
      if (!game.interested(v, s)) continue;
      for (std::size_t w : followers[v]) {
        if (out.received[w].test(s) || !relays(game, expertise, v, w, s)) continue;
        out.received[w].set(s);
        queue.push_back(w);
      }
    }
  }
  return out;
}

}  // namespace detail

/// Plain social filtering: u receives s iff some producer-to-u path has
/// only interested intermediate users. The receiving end need not care.
inline Dissemination disseminate(const FlowGame& game, const Configuration& config) {
  validate(game, config);
  return detail::spread(game, config, false);
}

/// Expertise filtering: additionally each hop between users must not move
/// away from s, i.e. d(s_v, s) <= d(s_w, s) for the edge v -> w.
inline Dissemination disseminate_expertise(const FlowGame& game, const Configuration& config) {
  if (game.mode() != FilterMode::expertise_filtered)
    throw PreconditionError("disseminate_expertise: game is not expertise-filtered");
  if (!game.has_metric_interests())
    throw PreconditionError("disseminate_expertise: missing metric");
  validate(game, config);
  return detail::spread(game, config, true);
}

/// Dispatches on the game's filter mode.
inline Dissemination disseminate_active(const FlowGame& game, const Configuration& config) {
  return game.mode() == FilterMode::plain ? disseminate(game, config)
                                          : disseminate_expertise(game, config);
}

/// Sum of W_u(s) over received subjects.
inline Value utility(const FlowGame& game, const SubjectSet& received, std::size_t u) {
  Value total = 0;
  for (auto s = received.find_first(); s != SubjectSet::npos; s = received.find_next(s))
    total += game.weight(u, s);
  return total;
}

inline Value utility(const FlowGame& game, const Dissemination& d, std::size_t u) {
  if (u >= game.n()) throw PreconditionError("utility: unknown user");
  if (game.utility_mode() != UtilityMode::weighted_sum)
    throw PreconditionError("utility: game uses nearest-subject utility");
  return utility(game, d[u], u);
}

/// Largest R such that every subject within R of s_u is received. R ranges
/// over {0} and the realized subject distances up to R_u; a fully received
/// interest ball scores R_u itself.
inline Distance utility_nearest(const FlowGame& game, const SubjectSet& received, std::size_t u) {
  const Distance cap = game.radius(u);
  std::vector<std::pair<Distance, bool>> levels;
  for (std::size_t s = 0; s < game.p(); ++s) {
    const Distance d = game.subject_distance(u, s);
    if (d <= cap) levels.emplace_back(d, received.test(s));
  }
  std::sort(levels.begin(), levels.end());
  Distance best = 0;
  for (std::size_t i = 0; i < levels.size();) {
    const Distance d = levels[i].first;
    bool complete = true;
    for (; i < levels.size() && levels[i].first == d; ++i) complete = complete && levels[i].second;
    if (!complete) return best;
    best = d;
  }
  return cap;
}

inline Distance utility_nearest(const FlowGame& game, const Dissemination& d, std::size_t u) {
  if (u >= game.n()) throw PreconditionError("utility_nearest: unknown user");
  if (!game.has_metric_interests()) throw PreconditionError("utility_nearest: missing metric");
  return utility_nearest(game, d[u], u);
}

/// Utility under the game's active utility mode.
inline Value active_utility(const FlowGame& game, const SubjectSet& received, std::size_t u) {
  return game.utility_mode() == UtilityMode::weighted_sum ? utility(game, received, u)
                                                          : utility_nearest(game, received, u);
}

/// Best utility u could ever reach under the active mode.
inline Value max_utility(const FlowGame& game, std::size_t u) {
  return game.utility_mode() == UtilityMode::weighted_sum ? game.max_weighted_utility(u)
                                                          : game.radius(u);
}

}  // namespace flowgame
