#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "flowgame/metric_space.hpp"
#include "flowgame/types.hpp"

namespace flowgame {

enum class FilterMode { plain, expertise_filtered };
enum class UtilityMode { weighted_sum, nearest_subject };

/// Ball-shaped interest: center is a metric point id, radius in metric units.
/// Every subject inside the ball is valued at one unit (`scale` ticks).
struct MetricInterest {
  std::int64_t center = 0;
  Distance radius = 0;
  bool operator==(const MetricInterest&) const = default;
};

/// One user as written in an instance document. Exactly one of
/// `weights` (explicit tick values per subject id) or `ball` is meaningful.
struct UserSpec {
  UserId id;
  int budget = 1;
  std::map<std::int64_t, Value> weights;
  std::optional<MetricInterest> ball;
  bool operator==(const UserSpec&) const = default;
};

/// A validated flow game. Immutable after construction.
class FlowGame {
 public:
  FlowGame(std::int64_t scale, std::vector<SubjectId> producers,
           std::vector<UserSpec> users, std::optional<MetricSpace> metric = std::nullopt,
           FilterMode mode = FilterMode::plain,
           UtilityMode utility_mode = UtilityMode::weighted_sum)
      : scale_(scale),
        producers_(std::move(producers)),
        users_(std::move(users)),
        metric_(std::move(metric)),
        mode_(mode),
        utility_mode_(utility_mode) {
    std::sort(producers_.begin(), producers_.end());
    std::sort(users_.begin(), users_.end(),
              [](const UserSpec& a, const UserSpec& b) { return a.id < b.id; });
    validate_and_index();
  }

  std::int64_t scale() const { return scale_; }
  std::size_t n() const { return users_.size(); }
  std::size_t p() const { return producers_.size(); }
  std::size_t node_count() const { return n() + p(); }
  FilterMode mode() const { return mode_; }
  UtilityMode utility_mode() const { return utility_mode_; }

  const std::vector<UserSpec>& users() const { return users_; }
  const std::vector<SubjectId>& producers() const { return producers_; }
  const UserSpec& user(std::size_t u) const { return users_[u]; }
  int budget(std::size_t u) const { return users_[u].budget; }

  bool is_user(Node v) const { return v < n(); }
  Node producer_node(std::size_t s) const { return static_cast<Node>(n() + s); }
  std::size_t subject_of(Node v) const { return v - n(); }

  std::optional<std::size_t> user_index(UserId id) const {
    auto it = user_index_.find(id.value);
    if (it == user_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> subject_index(SubjectId id) const {
    auto it = subject_index_.find(id.value);
    if (it == subject_index_.end()) return std::nullopt;
    return it->second;
  }

  /// Resolves an external endpoint id (user or producer) to a node.
  std::optional<Node> node_of(std::int64_t id) const {
    if (auto u = user_index(UserId{id})) return static_cast<Node>(*u);
    if (auto s = subject_index(SubjectId{id})) return producer_node(*s);
    return std::nullopt;
  }
  std::int64_t endpoint_id(Node v) const {
    return is_user(v) ? users_[v].id.value : producers_[subject_of(v)].value;
  }

  Value weight(std::size_t u, std::size_t s) const { return weights_[u][s]; }
  bool interested(std::size_t u, std::size_t s) const { return weights_[u][s] > 0; }
  const SubjectSet& interest(std::size_t u) const { return interest_[u]; }
  /// Sum of W_u(s) over S_u: the largest weighted utility u can reach.
  Value max_weighted_utility(std::size_t u) const { return max_weighted_[u]; }

  bool has_metric() const { return metric_.has_value(); }
  const MetricSpace& metric() const {
    if (!metric_) throw PreconditionError("game has no metric attached");
    return *metric_;
  }
  const std::optional<MetricSpace>& metric_attachment() const { return metric_; }

  /// True when every user carries a ball interest (metric flow game).
  bool has_metric_interests() const {
    return metric_ && std::all_of(users_.begin(), users_.end(),
                                  [](const UserSpec& u) { return u.ball.has_value(); });
  }
  std::size_t center_point(std::size_t u) const { return center_point_.at(u); }
  std::size_t producer_point(std::size_t s) const { return producer_point_.at(s); }
  Distance radius(std::size_t u) const { return users_[u].ball.value().radius; }
  /// d(s_u, s) for a metric-interest user.
  Distance subject_distance(std::size_t u, std::size_t s) const {
    return subject_distance_[u][s];
  }

  /// S_u = P for every user and all weights share a single value.
  bool is_homogeneous() const {
    if (n() == 0 || p() == 0) return false;
    const Value w = weights_[0][0];
    if (w <= 0) return false;
    for (const auto& row : weights_)
      for (Value x : row)
        if (x != w) return false;
    return true;
  }

  bool operator==(const FlowGame& other) const {
    return scale_ == other.scale_ && producers_ == other.producers_ &&
           users_ == other.users_ && metric_ == other.metric_ && mode_ == other.mode_ &&
           utility_mode_ == other.utility_mode_;
  }

 private:
  void validate_and_index() {
    if (scale_ < 1) throw InstanceError("scale: must be a positive integer");
    for (std::size_t s = 0; s < producers_.size(); ++s) {
      if (!subject_index_.emplace(producers_[s].value, s).second)
        throw InstanceError("producers: duplicate subject id " +
                            std::to_string(producers_[s].value));
    }
    for (std::size_t u = 0; u < users_.size(); ++u) {
      const auto& spec = users_[u];
      const std::string where = "users[id=" + std::to_string(spec.id.value) + "]";
      if (!user_index_.emplace(spec.id.value, u).second)
        throw InstanceError(where + ": duplicate user id");
      if (subject_index_.count(spec.id.value))
        throw InstanceError(where + ": id collides with a producer id");
      if (spec.budget < 1) throw InstanceError(where + ".budget: must be >= 1");
    }

    if (metric_) {
      if (auto v = check_metric(*metric_)) throw InstanceError("metric: " + v->describe(*metric_));
      if (auto v = find_coincident_points(*metric_))
        throw InstanceError("metric: " + v->describe(*metric_));
      producer_point_.resize(p());
      for (std::size_t s = 0; s < p(); ++s) {
        auto idx = metric_->index_of(producers_[s].value);
        if (!idx)
          throw InstanceError("metric.points: producer " + std::to_string(producers_[s].value) +
                              " has no point");
        producer_point_[s] = *idx;
      }
    }

    weights_.assign(n(), std::vector<Value>(p(), 0));
    interest_.assign(n(), SubjectSet(p()));
    max_weighted_.assign(n(), 0);
    center_point_.assign(n(), 0);
    subject_distance_.assign(n(), {});
    for (std::size_t u = 0; u < n(); ++u) {
      const auto& spec = users_[u];
      const std::string where = "users[id=" + std::to_string(spec.id.value) + "]";
      if (spec.ball) {
        if (!spec.weights.empty())
          throw InstanceError(where + ": give either weights or center/radius, not both");
        if (!metric_) throw InstanceError(where + ": center/radius requires a metric");
        auto c = metric_->index_of(spec.ball->center);
        if (!c)
          throw InstanceError(where + ".center: unknown metric point " +
                              std::to_string(spec.ball->center));
        if (spec.ball->radius < 0) throw InstanceError(where + ".radius: must be >= 0");
        center_point_[u] = *c;
        subject_distance_[u].resize(p());
        for (std::size_t s = 0; s < p(); ++s) {
          subject_distance_[u][s] = (*metric_)(*c, producer_point_[s]);
          if (subject_distance_[u][s] <= spec.ball->radius) weights_[u][s] = scale_;
        }
      } else {
        for (const auto& [sid, w] : spec.weights) {
          auto s = subject_index(SubjectId{sid});
          if (!s)
            throw InstanceError(where + ".weights: unknown subject " + std::to_string(sid));
          if (w < 0)
            throw InstanceError(where + ".weights[" + std::to_string(sid) + "]: negative value");
          weights_[u][*s] = w;
        }
      }
      for (std::size_t s = 0; s < p(); ++s) {
        if (weights_[u][s] > 0) {
          interest_[u].set(s);
          max_weighted_[u] += weights_[u][s];
        }
      }
    }

    const bool needs_metric = mode_ == FilterMode::expertise_filtered ||
                              utility_mode_ == UtilityMode::nearest_subject;
    if (needs_metric && !has_metric_interests())
      throw InstanceError(
          "mode: expertise filtering / nearest-subject utility require a metric and a "
          "center/radius for every user");

    for (std::size_t s = 0; s < p(); ++s) {
      bool covered = false;
      for (std::size_t u = 0; u < n() && !covered; ++u) covered = interested(u, s);
      if (!covered)
        throw InstanceError("producers: subject " + std::to_string(producers_[s].value) +
                            " is in no user's interest set");
    }
  }

  std::int64_t scale_;
  std::vector<SubjectId> producers_;
  std::vector<UserSpec> users_;
  std::optional<MetricSpace> metric_;
  FilterMode mode_;
  UtilityMode utility_mode_;

  std::unordered_map<std::int64_t, std::size_t> user_index_;
  std::unordered_map<std::int64_t, std::size_t> subject_index_;
  std::vector<std::vector<Value>> weights_;
  std::vector<SubjectSet> interest_;
  std::vector<Value> max_weighted_;
  std::vector<std::size_t> center_point_;
  std::vector<std::size_t> producer_point_;
  std::vector<std::vector<Distance>> subject_distance_;
};

/// S_u as external subject ids.
inline std::vector<SubjectId> interest_set(const FlowGame& game, UserId u) {
  auto idx = game.user_index(u);
  if (!idx) throw PreconditionError("unknown user " + std::to_string(u.value));
  std::vector<SubjectId> out;
  for (auto s : to_indices(game.interest(*idx))) out.push_back(game.producers()[s]);
  return out;
}

/// Per-user follow sets F_u over dense node indices.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::size_t users) : follows_(users) {}

  std::size_t users() const { return follows_.size(); }
  const Strategy& follows(std::size_t u) const { return follows_[u]; }

  /// Replaces F_u after checking it against the game's invariants.
  void set_strategy(const FlowGame& game, std::size_t u, Strategy strategy) {
    std::sort(strategy.begin(), strategy.end());
    check_strategy(game, u, strategy);
    follows_[u] = std::move(strategy);
  }

  /// Total number of follow links.
  std::size_t edge_count() const {
    std::size_t m = 0;
    for (const auto& f : follows_) m += f.size();
    return m;
  }

  std::uint64_t hash() const {
    // FNV-1a over (user, size, endpoints...)
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t x) {
      for (int i = 0; i < 8; ++i) {
        h ^= (x >> (8 * i)) & 0xff;
        h *= 1099511628211ULL;
      }
    };
    for (const auto& f : follows_) {
      mix(f.size());
      for (Node v : f) mix(v);
    }
    return h;
  }

  bool operator==(const Configuration&) const = default;

  static void check_strategy(const FlowGame& game, std::size_t u, const Strategy& strategy) {
    const std::string where = "follows[" + std::to_string(game.user(u).id.value) + "]";
    if (strategy.size() > static_cast<std::size_t>(game.budget(u)))
      throw InstanceError(where + ": " + std::to_string(strategy.size()) +
                          " links exceed budget " + std::to_string(game.budget(u)));
    for (std::size_t i = 0; i < strategy.size(); ++i) {
      if (strategy[i] >= game.node_count())
        throw InstanceError(where + ": dangling endpoint");
      if (strategy[i] == u) throw InstanceError(where + ": self-follow");
      if (i > 0 && strategy[i] == strategy[i - 1])
        throw InstanceError(where + ": duplicate edge to " +
                            std::to_string(game.endpoint_id(strategy[i])));
    }
  }

 private:
  std::vector<Strategy> follows_;
};

inline void validate(const FlowGame& game, const Configuration& config) {
  if (config.users() != game.n())
    throw InstanceError("configuration covers " + std::to_string(config.users()) +
                        " users, game has " + std::to_string(game.n()));
  for (std::size_t u = 0; u < game.n(); ++u)
    Configuration::check_strategy(game, u, config.follows(u));
}

}  // namespace flowgame
