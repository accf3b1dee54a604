#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "flowgame/model.hpp"
#include "flowgame/propagation.hpp"

namespace flowgame {

// ---------------------------------------------------------------------------
// Potentials

/// Integer vector under lexicographic order. Stands in for the scalar
/// potentials (-sum n_i n^(p-i), sum n_i (n+p)^(2(m-i))) which share its order
/// but overflow quickly.
struct PotentialTuple {
  std::vector<std::int64_t> counts;
  auto operator<=>(const PotentialTuple&) const = default;
  bool operator==(const PotentialTuple&) const = default;
};

/// (n_0, ..., n_p): n_i users receive exactly i subjects.
inline PotentialTuple potential_homogeneous(const FlowGame& game, const Dissemination& d) {
  if (!game.is_homogeneous())
    throw PreconditionError("potential_homogeneous: game is not homogeneous");
  PotentialTuple t{std::vector<std::int64_t>(game.p() + 1, 0)};
  for (std::size_t u = 0; u < game.n(); ++u) ++t.counts[d[u].count()];
  return t;
}

inline PotentialTuple potential_homogeneous(const FlowGame& game, const Configuration& config) {
  if (!game.is_homogeneous())
    throw PreconditionError("potential_homogeneous: game is not homogeneous");
  return potential_homogeneous(game, detail::spread(game, config,
                                                    game.mode() == FilterMode::expertise_filtered));
}

/// (n_1, ..., n_m) over the sorted distinct distances r_1 < ... < r_m of the
/// metric: n_i counts received pairs (u, s), s in S_u, with d(s_u, s) = r_i.
inline PotentialTuple potential_metric(const FlowGame& game, const Dissemination& d) {
  if (!game.has_metric_interests()) throw PreconditionError("potential_metric: missing metric");
  const auto levels = game.metric().distinct_distances();
  PotentialTuple t{std::vector<std::int64_t>(levels.size(), 0)};
  for (std::size_t u = 0; u < game.n(); ++u) {
    for (auto s : to_indices(d[u])) {
      if (!game.interested(u, s)) continue;
      auto it = std::lower_bound(levels.begin(), levels.end(), game.subject_distance(u, s));
      ++t.counts[static_cast<std::size_t>(it - levels.begin())];
    }
  }
  return t;
}

inline PotentialTuple potential_metric(const FlowGame& game, const Configuration& config) {
  if (game.mode() != FilterMode::expertise_filtered ||
      game.utility_mode() != UtilityMode::nearest_subject)
    throw PreconditionError(
        "potential_metric: needs expertise filtering with nearest-subject utility");
  return potential_metric(game, disseminate_expertise(game, config));
}

enum class PotentialKind { none, homogeneous, metric };

inline PotentialKind potential_kind(const FlowGame& game) {
  if (game.mode() == FilterMode::expertise_filtered &&
      game.utility_mode() == UtilityMode::nearest_subject)
    return PotentialKind::metric;
  if (game.mode() == FilterMode::plain && game.utility_mode() == UtilityMode::weighted_sum &&
      game.is_homogeneous())
    return PotentialKind::homogeneous;
  return PotentialKind::none;
}

// ---------------------------------------------------------------------------
// Move search

enum class SearchMode {
  swap,        // single-link add / drop / replace
  exhaustive,  // every follow set of size <= budget
  greedy,      // swap neighbourhood plus a greedy-cover best response
  restricted,  // only the listed candidate strategies per user
};

/// What a quiescent configuration has been shown stable against.
enum class Certification { exhaustive, swap_only, greedy, restricted };

struct SearchOptions {
  SearchMode mode = SearchMode::exhaustive;
  std::uint64_t exhaustive_cap = 1'000'000;
  /// For SearchMode::restricted: alternatives offered to each user index.
  /// Users without an entry never move.
  std::map<std::size_t, std::vector<Strategy>> candidates;
};

struct Move {
  std::size_t user = 0;
  Strategy before;
  Strategy after;
  Value utility_before = 0;
  Value utility_after = 0;
  bool operator==(const Move&) const = default;
};

/// For each node x != u: the subjects u would obtain by following x, with
/// the rest of the graph fixed and u itself removed (a simple path into u
/// never passes through u).
inline std::vector<SubjectSet> contributions(const FlowGame& game, const Configuration& config,
                                             std::size_t u) {
  const bool expertise = game.mode() == FilterMode::expertise_filtered;
  const Dissemination others = detail::spread(game, config, expertise, u);
  std::vector<SubjectSet> out(game.node_count(), SubjectSet(game.p()));
  for (std::size_t v = 0; v < game.n(); ++v) {
    if (v == u) continue;
    for (auto s : to_indices(others[v]))
      if (detail::relays(game, expertise, v, u, s)) out[v].set(s);
  }
  for (std::size_t s = 0; s < game.p(); ++s) out[game.producer_node(s)].set(s);
  return out;
}

inline SubjectSet reception(const std::vector<SubjectSet>& contrib, const Strategy& strategy,
                            std::size_t p) {
  SubjectSet r(p);
  for (Node v : strategy) r |= contrib[v];
  return r;
}

/// Nearest-subject re-connection rule: some gained subject s must be at
/// least as close to s_u as every lost subject.
inline bool respects_nearest_rule(const FlowGame& game, std::size_t u, const SubjectSet& before,
                                  const SubjectSet& after) {
  const SubjectSet gained = after - before;
  const SubjectSet lost = before - after;
  if (gained.none() || lost.none()) return true;
  Distance nearest_gain = std::numeric_limits<Distance>::max();
  for (auto s : to_indices(gained))
    nearest_gain = std::min(nearest_gain, game.subject_distance(u, s));
  for (auto t : to_indices(lost))
    if (game.subject_distance(u, t) < nearest_gain) return false;
  return true;
}

/// Number of follow sets of size <= budget over `endpoints` choices,
/// saturating just above `cap`.
inline std::uint64_t strategy_count(std::uint64_t endpoints, std::uint64_t budget,
                                    std::uint64_t cap) {
  unsigned __int128 total = 0;
  unsigned __int128 binom = 1;  // C(endpoints, k)
  for (std::uint64_t k = 0; k <= budget && k <= endpoints; ++k) {
    if (k > 0) binom = binom * (endpoints - k + 1) / k;
    total += binom;
    if (total > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(total);
}

namespace detail {

struct Candidate {
  Value utility = std::numeric_limits<Value>::min();
  Strategy strategy;
  bool valid = false;
};

class MoveSearch {
 public:
  MoveSearch(const FlowGame& game, const Configuration& config, std::size_t u)
      : game_(game),
        u_(u),
        contrib_(contributions(game, config, u)),
        current_(config.follows(u)),
        current_reception_(reception(contrib_, current_, game.p())),
        current_utility_(active_utility(game, current_reception_, u)),
        nearest_(game.utility_mode() == UtilityMode::nearest_subject) {}

  Value current_utility() const { return current_utility_; }
  const SubjectSet& current_reception() const { return current_reception_; }

  void offer(const Strategy& s) { offer(s, reception(contrib_, s, game_.p())); }

  void offer(const Strategy& s, const SubjectSet& received) {
    const Value value = active_utility(game_, received, u_);
    if (value <= current_utility_) return;
    if (best_.valid && (value < best_.utility || (value == best_.utility && s >= best_.strategy)))
      return;
    if (nearest_ && !respects_nearest_rule(game_, u_, current_reception_, received)) return;
    best_ = Candidate{value, s, true};
  }

  void swap_neighbourhood() {
    const std::size_t budget = static_cast<std::size_t>(game_.budget(u_));
    Strategy s;
    for (std::size_t i = 0; i < current_.size(); ++i) {
      s = current_;
      s.erase(s.begin() + static_cast<std::ptrdiff_t>(i));
      offer(s);
    }
    for (Node y = 0; y < game_.node_count(); ++y) {
      if (y == u_ || std::binary_search(current_.begin(), current_.end(), y)) continue;
      if (current_.size() < budget) {
        s = current_;
        s.insert(std::upper_bound(s.begin(), s.end(), y), y);
        offer(s);
      }
      for (std::size_t i = 0; i < current_.size(); ++i) {
        s = current_;
        s.erase(s.begin() + static_cast<std::ptrdiff_t>(i));
        s.insert(std::upper_bound(s.begin(), s.end(), y), y);
        offer(s);
      }
    }
  }

  void exhaustive(std::uint64_t cap) {
    const std::uint64_t count =
        strategy_count(game_.node_count() - 1, static_cast<std::uint64_t>(game_.budget(u_)), cap);
    if (count > cap)
      throw CapExceeded("exhaustive search for user " + std::to_string(game_.user(u_).id.value) +
                        " exceeds " + std::to_string(cap) + " candidate strategies");
    Strategy s;
    std::vector<SubjectSet> stack(static_cast<std::size_t>(game_.budget(u_)) + 1,
                                  SubjectSet(game_.p()));
    enumerate(0, s, stack);
  }

  void greedy() {
    swap_neighbourhood();
    offer_greedy_cover();
  }

  std::optional<Move> result() const {
    if (!best_.valid) return std::nullopt;
    return Move{u_, current_, best_.strategy, current_utility_, best_.utility};
  }

 private:
  // Pre-order DFS yields follow sets in lexicographic order.
  void enumerate(Node start, Strategy& s, std::vector<SubjectSet>& stack) {
    offer(s, stack[s.size()]);
    if (s.size() == static_cast<std::size_t>(game_.budget(u_))) return;
    for (Node v = start; v < game_.node_count(); ++v) {
      if (v == u_) continue;
      stack[s.size() + 1] = stack[s.size()];
      stack[s.size() + 1] |= contrib_[v];
      s.push_back(v);
      enumerate(v + 1, s, stack);
      s.pop_back();
    }
  }

  Node best_cover_step(const SubjectSet& uncovered, const Strategy& chosen,
                       std::size_t& gain) const {
    Node pick = 0;
    gain = 0;
    for (Node v = 0; v < game_.node_count(); ++v) {
      if (v == u_ || std::find(chosen.begin(), chosen.end(), v) != chosen.end()) continue;
      const std::size_t g = (contrib_[v] & uncovered).count();
      if (g > gain) {
        gain = g;
        pick = v;
      }
    }
    return pick;
  }

  void offer_greedy_cover() {
    const std::size_t budget = static_cast<std::size_t>(game_.budget(u_));
    if (!nearest_) {
      // Max-weight coverage, one endpoint at a time.
      Strategy s;
      SubjectSet have(game_.p());
      while (s.size() < budget) {
        Node pick = 0;
        Value gain = 0;
        for (Node v = 0; v < game_.node_count(); ++v) {
          if (v == u_ || std::find(s.begin(), s.end(), v) != s.end()) continue;
          const Value g = utility(game_, contrib_[v] - have, u_);
          if (g > gain) {
            gain = g;
            pick = v;
          }
        }
        if (gain == 0) break;
        s.push_back(pick);
        have |= contrib_[pick];
      }
      std::sort(s.begin(), s.end());
      offer(s);
      return;
    }
    // Nearest-subject: cover growing prefix balls of S_u, keep the largest
    // one that fits the budget.
    std::vector<Distance> levels;
    for (std::size_t s = 0; s < game_.p(); ++s)
      if (game_.subject_distance(u_, s) <= game_.radius(u_))
        levels.push_back(game_.subject_distance(u_, s));
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    std::optional<Strategy> last;
    for (Distance level : levels) {
      SubjectSet uncovered(game_.p());
      for (std::size_t s = 0; s < game_.p(); ++s)
        if (game_.subject_distance(u_, s) <= level) uncovered.set(s);
      Strategy s;
      while (uncovered.any() && s.size() < budget) {
        std::size_t gain = 0;
        const Node pick = best_cover_step(uncovered, s, gain);
        if (gain == 0) break;
        s.push_back(pick);
        uncovered -= contrib_[pick];
      }
      if (uncovered.any()) break;
      std::sort(s.begin(), s.end());
      last = std::move(s);
    }
    if (last) offer(*last);
  }

  const FlowGame& game_;
  std::size_t u_;
  std::vector<SubjectSet> contrib_;
  Strategy current_;
  SubjectSet current_reception_;
  Value current_utility_;
  bool nearest_;
  Candidate best_;
};

}  // namespace detail

/// The best strictly improving move for user u under `options`, or none.
/// Ties between equally good strategies go to the lexicographically
/// smallest follow set.
inline std::optional<Move> improving_move(const FlowGame& game, const Configuration& config,
                                          std::size_t u, const SearchOptions& options = {}) {
  if (u >= game.n()) throw PreconditionError("improving_move: unknown user");
  detail::MoveSearch search(game, config, u);
  if (search.current_utility() >= max_utility(game, u)) return std::nullopt;
  switch (options.mode) {
    case SearchMode::swap:
      search.swap_neighbourhood();
      break;
    case SearchMode::exhaustive:
      search.exhaustive(options.exhaustive_cap);
      break;
    case SearchMode::greedy:
      search.greedy();
      break;
    case SearchMode::restricted: {
      auto it = options.candidates.find(u);
      if (it == options.candidates.end()) return std::nullopt;
      for (Strategy s : it->second) {
        std::sort(s.begin(), s.end());
        Configuration::check_strategy(game, u, s);
        search.offer(s);
      }
      break;
    }
  }
  return search.result();
}

// ---------------------------------------------------------------------------
// Cycle detection

/// Remembers every configuration visited; reports the first recurrence.
class CycleDetector {
 public:
  struct Cycle {
    std::size_t entry;
    std::size_t period;
  };

  /// Records the configuration at the next step index. Returns the cycle if
  /// an identical configuration was seen before.
  std::optional<Cycle> record(const Configuration& config) {
    const std::size_t step = history_.size();
    auto& bucket = seen_[config.hash()];
    for (std::size_t j : bucket)
      if (history_[j] == config) return Cycle{j, step - j};
    bucket.push_back(step);
    history_.push_back(config);
    return std::nullopt;
  }

 private:
  std::vector<Configuration> history_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen_;
};

/// First recurrence in a sequence of visited configurations.
inline std::optional<CycleDetector::Cycle> detect_cycle(
    const std::vector<Configuration>& visited) {
  CycleDetector detector;
  for (const auto& c : visited)
    if (auto cycle = detector.record(c)) return cycle;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Dynamics

enum class SchedulerKind { round_robin, random };

struct Scheduler {
  SchedulerKind kind = SchedulerKind::round_robin;
  std::uint64_t seed = 0;
};

struct DynamicsLimits {
  std::size_t max_steps = 100'000;
  /// 0 means unbounded.
  std::size_t max_rounds = 0;
};

struct Verdict {
  enum class Kind { converged, cycled, step_limit };
  Kind kind = Kind::step_limit;
  std::size_t steps = 0;
  std::size_t cycle_entry = 0;
  std::size_t period = 0;
};

struct DynamicsTrace {
  Configuration initial;
  std::vector<Move> moves;
  /// potentials[k] is taken after k moves; empty when the game has none.
  std::vector<PotentialTuple> potentials;
  PotentialKind potential = PotentialKind::none;
  Verdict verdict;
  std::size_t rounds = 0;
  Certification certification = Certification::exhaustive;
  Configuration final;
};

inline const char* to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::converged: return "converged";
    case Verdict::Kind::cycled: return "cycled";
    case Verdict::Kind::step_limit: return "step_limit";
  }
  return "?";
}

inline const char* to_string(Certification c) {
  switch (c) {
    case Certification::exhaustive: return "exhaustive";
    case Certification::swap_only: return "swap_only";
    case Certification::greedy: return "greedy";
    case Certification::restricted: return "restricted";
  }
  return "?";
}

inline const char* to_string(SearchMode m) {
  switch (m) {
    case SearchMode::swap: return "swap";
    case SearchMode::exhaustive: return "exhaustive";
    case SearchMode::greedy: return "greedy";
    case SearchMode::restricted: return "restricted";
  }
  return "?";
}

inline Certification certification_of(SearchMode m) {
  switch (m) {
    case SearchMode::swap: return Certification::swap_only;
    case SearchMode::exhaustive: return Certification::exhaustive;
    case SearchMode::greedy: return Certification::greedy;
    case SearchMode::restricted: return Certification::restricted;
  }
  return Certification::swap_only;
}

namespace detail {

// Unbiased draw in [0, bound) by rejection; keeps replays identical across
// standard library implementations.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do x = rng(); while (x >= limit);
  return x % bound;
}

inline PotentialTuple potential_of(const FlowGame& game, PotentialKind kind,
                                   const Configuration& config) {
  switch (kind) {
    case PotentialKind::homogeneous: return potential_homogeneous(game, config);
    case PotentialKind::metric: return potential_metric(game, config);
    case PotentialKind::none: break;
  }
  return {};
}

}  // namespace detail

/// Selfish dynamics from `initial`. Each round offers every user one move
/// in scheduler order; a full round without moves ends in `converged`.
inline DynamicsTrace run_dynamics(const FlowGame& game, const Configuration& initial,
                                  const Scheduler& scheduler, const SearchOptions& search,
                                  const DynamicsLimits& limits = {}) {
  validate(game, initial);
  DynamicsTrace trace;
  trace.initial = initial;
  trace.potential = potential_kind(game);
  trace.certification = certification_of(search.mode);

  Configuration config = initial;
  CycleDetector detector;
  detector.record(config);
  if (trace.potential != PotentialKind::none)
    trace.potentials.push_back(detail::potential_of(game, trace.potential, config));

  std::mt19937_64 rng(scheduler.seed);
  std::vector<std::size_t> order(game.n());

  auto finish = [&](Verdict v) {
    v.steps = trace.moves.size();
    trace.verdict = v;
    trace.final = config;
    return trace;
  };

  for (;;) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (scheduler.kind == SchedulerKind::random) {
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[detail::bounded(rng, i)]);
    }
    ++trace.rounds;
    bool moved = false;
    for (std::size_t u : order) {
      std::optional<Move> move;
      try {
        move = improving_move(game, config, u, search);
      } catch (const CapExceeded&) {
        SearchOptions fallback = search;
        fallback.mode = SearchMode::swap;
        trace.certification = Certification::swap_only;
        move = improving_move(game, config, u, fallback);
      }
      if (!move) continue;
      if (trace.moves.size() >= limits.max_steps) return finish({Verdict::Kind::step_limit});
      config.set_strategy(game, u, move->after);
      trace.moves.push_back(std::move(*move));
      if (trace.potential != PotentialKind::none)
        trace.potentials.push_back(detail::potential_of(game, trace.potential, config));
      moved = true;
      if (auto cycle = detector.record(config))
        return finish({Verdict::Kind::cycled, 0, cycle->entry, cycle->period});
    }
    if (!moved) return finish({Verdict::Kind::converged});
    if (limits.max_rounds != 0 && trace.rounds >= limits.max_rounds)
      return finish({Verdict::Kind::step_limit});
  }
}

/// Rebuilds the configuration after each move; used to check traces.
inline std::vector<Configuration> replay(const FlowGame& game, const DynamicsTrace& trace) {
  std::vector<Configuration> states{trace.initial};
  for (const auto& m : trace.moves) {
    Configuration next = states.back();
    if (next.follows(m.user) != m.before)
      throw PreconditionError("replay: move does not start from the recorded strategy");
    next.set_strategy(game, m.user, m.after);
    states.push_back(std::move(next));
  }
  return states;
}

}  // namespace flowgame
