#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowgame/analysis.hpp"
#include "flowgame/dynamics.hpp"
#include "flowgame/metric.hpp"
#include "flowgame/model.hpp"
#include "flowgame/propagation.hpp"

namespace flowgame {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "flowgame 1.0.0";

/// 64-bit FNV-1a, used for instance hashes in manifests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

namespace detail {

inline const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw InstanceError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw InstanceError(where + ": missing field '" + key + "'");
  return *it;
}

inline std::int64_t as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw InstanceError(where + ": expected an integer");
  return v.get<std::int64_t>();
}

inline std::int64_t key_int(const std::string& key, const std::string& where) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(key, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != key.size() || key.empty())
    throw InstanceError(where + ": key '" + key + "' is not an integer id");
  return v;
}

inline void reject_unknown(const json& obj, const std::set<std::string>& known,
                           const std::string& where) {
  for (const auto& [k, _] : obj.items())
    if (!known.count(k)) throw InstanceError(where + ": unknown field '" + k + "'");
}

inline json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InstanceError(std::string("parse error: ") + e.what());
  }
}

}  // namespace detail

inline const char* to_string(FilterMode m) {
  return m == FilterMode::plain ? "plain" : "expertise_filtered";
}
inline const char* to_string(UtilityMode m) {
  return m == UtilityMode::weighted_sum ? "weighted_sum" : "nearest_subject";
}

// ---------------------------------------------------------------------------
// Instance document

inline FlowGame instance_from_json(const json& doc) {
  using namespace detail;
  reject_unknown(doc, {"scale", "producers", "users", "metric", "mode", "utility_mode", "manifest"},
                 "instance");
  const std::int64_t scale = doc.contains("scale") ? as_int(doc["scale"], "scale") : 100;

  std::vector<SubjectId> producers;
  const auto& prod = field(doc, "producers", "instance");
  if (!prod.is_array()) throw InstanceError("producers: expected an array");
  for (std::size_t i = 0; i < prod.size(); ++i)
    producers.push_back(SubjectId{as_int(prod[i], "producers[" + std::to_string(i) + "]")});

  std::vector<UserSpec> users;
  const auto& us = field(doc, "users", "instance");
  if (!us.is_array()) throw InstanceError("users: expected an array");
  for (std::size_t i = 0; i < us.size(); ++i) {
    const std::string where = "users[" + std::to_string(i) + "]";
    const auto& u = us[i];
    reject_unknown(u, {"id", "budget", "weights", "center", "radius"}, where);
    UserSpec spec;
    spec.id = UserId{as_int(field(u, "id", where), where + ".id")};
    const auto budget = as_int(field(u, "budget", where), where + ".budget");
    if (budget < 1 || budget > 1'000'000) throw InstanceError(where + ".budget: must be in [1, 1e6]");
    spec.budget = static_cast<int>(budget);
    if (u.contains("weights")) {
      const auto& w = u["weights"];
      if (!w.is_object()) throw InstanceError(where + ".weights: expected an object");
      for (const auto& [k, v] : w.items()) {
        const std::string wk = where + ".weights[" + k + "]";
        spec.weights[key_int(k, wk)] = as_int(v, wk);
      }
    }
    if (u.contains("center") || u.contains("radius")) {
      spec.ball = MetricInterest{as_int(field(u, "center", where), where + ".center"),
                                 as_int(field(u, "radius", where), where + ".radius")};
    }
    users.push_back(std::move(spec));
  }

  std::optional<MetricSpace> metric;
  if (doc.contains("metric")) {
    const auto& m = doc["metric"];
    reject_unknown(m, {"points", "matrix"}, "metric");
    std::vector<std::int64_t> points;
    for (const auto& p : field(m, "points", "metric")) points.push_back(as_int(p, "metric.points"));
    std::vector<std::vector<Distance>> matrix;
    const auto& rows = field(m, "matrix", "metric");
    if (!rows.is_array()) throw InstanceError("metric.matrix: expected an array");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].is_array()) throw InstanceError("metric.matrix[" + std::to_string(i) + "]: expected an array");
      std::vector<Distance> row;
      for (const auto& x : rows[i]) row.push_back(as_int(x, "metric.matrix[" + std::to_string(i) + "]"));
      matrix.push_back(std::move(row));
    }
    metric.emplace(std::move(points), std::move(matrix));
  }

  FilterMode mode = FilterMode::plain;
  if (doc.contains("mode")) {
    const auto s = doc["mode"].get<std::string>();
    if (s == "plain") mode = FilterMode::plain;
    else if (s == "expertise_filtered") mode = FilterMode::expertise_filtered;
    else throw InstanceError("mode: unknown value '" + s + "'");
  }
  UtilityMode umode = UtilityMode::weighted_sum;
  if (doc.contains("utility_mode")) {
    const auto s = doc["utility_mode"].get<std::string>();
    if (s == "weighted_sum") umode = UtilityMode::weighted_sum;
    else if (s == "nearest_subject") umode = UtilityMode::nearest_subject;
    else throw InstanceError("utility_mode: unknown value '" + s + "'");
  }
  return FlowGame(scale, std::move(producers), std::move(users), std::move(metric), mode, umode);
}

inline FlowGame load_instance(std::string_view text) {
  try {
    return instance_from_json(detail::parse(text));
  } catch (const json::exception& e) {
    throw InstanceError(std::string("instance: ") + e.what());
  }
}

inline json instance_to_json(const FlowGame& game) {
  json doc;
  doc["scale"] = game.scale();
  doc["producers"] = json::array();
  for (auto s : game.producers()) doc["producers"].push_back(s.value);
  doc["users"] = json::array();
  for (const auto& u : game.users()) {
    json ju{{"id", u.id.value}, {"budget", u.budget}};
    if (u.ball) {
      ju["center"] = u.ball->center;
      ju["radius"] = u.ball->radius;
    } else {
      ju["weights"] = json::object();
      for (const auto& [s, w] : u.weights) ju["weights"][std::to_string(s)] = w;
    }
    doc["users"].push_back(std::move(ju));
  }
  if (game.has_metric())
    doc["metric"] = json{{"points", game.metric().points()}, {"matrix", game.metric().matrix()}};
  doc["mode"] = to_string(game.mode());
  doc["utility_mode"] = to_string(game.utility_mode());
  return doc;
}

/// Canonical text: sorted keys, two-space indent, trailing newline.
inline std::string serialize_instance(const FlowGame& game) {
  return instance_to_json(game).dump(2) + "\n";
}

inline std::string instance_hash(const FlowGame& game) {
  return hex64(fnv1a64(instance_to_json(game).dump()));
}

// ---------------------------------------------------------------------------
// Configuration document

struct ConfigurationDocument {
  Configuration config;
  /// Optional per-user alternative strategies for restricted search.
  std::map<std::size_t, std::vector<Strategy>> candidates;
};

namespace detail {

inline Strategy strategy_from_json(const FlowGame& game, const json& list, std::size_t u,
                                   const std::string& where) {
  if (!list.is_array()) throw InstanceError(where + ": expected an array of endpoint ids");
  Strategy s;
  for (const auto& e : list) {
    const auto id = as_int(e, where);
    auto node = game.node_of(id);
    if (!node) throw InstanceError(where + ": dangling endpoint " + std::to_string(id));
    s.push_back(*node);
  }
  std::sort(s.begin(), s.end());
  Configuration::check_strategy(game, u, s);
  return s;
}

inline json strategy_to_json(const FlowGame& game, const Strategy& s) {
  json out = json::array();
  for (Node v : s) out.push_back(game.endpoint_id(v));
  return out;
}

inline std::size_t user_from_key(const FlowGame& game, const std::string& key,
                                 const std::string& where) {
  auto u = game.user_index(UserId{key_int(key, where)});
  if (!u) throw InstanceError(where + ": unknown user " + key);
  return *u;
}

}  // namespace detail

inline ConfigurationDocument configuration_from_json(const FlowGame& game, const json& doc) {
  using namespace detail;
  reject_unknown(doc, {"follows", "candidates", "manifest"}, "configuration");
  ConfigurationDocument out{Configuration(game.n()), {}};
  for (const auto& [k, list] : field(doc, "follows", "configuration").items()) {
    const std::string where = "follows[" + k + "]";
    const std::size_t u = user_from_key(game, k, where);
    out.config.set_strategy(game, u, strategy_from_json(game, list, u, where));
  }
  if (doc.contains("candidates")) {
    for (const auto& [k, alts] : doc["candidates"].items()) {
      const std::string where = "candidates[" + k + "]";
      const std::size_t u = user_from_key(game, k, where);
      if (!alts.is_array()) throw InstanceError(where + ": expected an array of strategies");
      for (const auto& alt : alts) out.candidates[u].push_back(strategy_from_json(game, alt, u, where));
    }
  }
  return out;
}

inline ConfigurationDocument load_configuration(const FlowGame& game, std::string_view text) {
  try {
    return configuration_from_json(game, detail::parse(text));
  } catch (const json::exception& e) {
    throw InstanceError(std::string("configuration: ") + e.what());
  }
}

inline json configuration_to_json(const FlowGame& game, const Configuration& config,
                                  const std::map<std::size_t, std::vector<Strategy>>& candidates = {}) {
  json doc;
  doc["follows"] = json::object();
  for (std::size_t u = 0; u < config.users(); ++u)
    doc["follows"][std::to_string(game.user(u).id.value)] =
        detail::strategy_to_json(game, config.follows(u));
  if (!candidates.empty()) {
    doc["candidates"] = json::object();
    for (const auto& [u, alts] : candidates) {
      json list = json::array();
      for (const auto& s : alts) list.push_back(detail::strategy_to_json(game, s));
      doc["candidates"][std::to_string(game.user(u).id.value)] = std::move(list);
    }
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Exports

/// userId -> sorted received subject ids.
inline json dissemination_to_json(const FlowGame& game, const Dissemination& d) {
  json out = json::object();
  for (std::size_t u = 0; u < game.n(); ++u) {
    std::vector<std::int64_t> ids;
    for (auto s : to_indices(d[u])) ids.push_back(game.producers()[s].value);
    std::sort(ids.begin(), ids.end());
    out[std::to_string(game.user(u).id.value)] = ids;
  }
  return out;
}

struct RunManifest {
  std::string command;
  std::string instance_hash;
  std::optional<std::uint64_t> seed;
  std::string search;
  std::string scheduler;
  std::map<std::string, std::int64_t> limits;
  std::string version = kToolVersion;
};

inline json manifest_to_json(const RunManifest& m) {
  json j{{"command", m.command},     {"instance_hash", m.instance_hash},
         {"search", m.search},       {"scheduler", m.scheduler},
         {"limits", m.limits},       {"version", m.version}};
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  return j;
}

inline json move_to_json(const FlowGame& game, const Move& m) {
  return json{{"user", game.user(m.user).id.value},
              {"old", detail::strategy_to_json(game, m.before)},
              {"new", detail::strategy_to_json(game, m.after)},
              {"u_before", m.utility_before},
              {"u_after", m.utility_after}};
}

inline json verdict_to_json(const DynamicsTrace& trace) {
  json v{{"verdict", to_string(trace.verdict.kind)},
         {"steps", trace.verdict.steps},
         {"rounds", trace.rounds},
         {"certification", to_string(trace.certification)}};
  if (trace.verdict.kind == Verdict::Kind::cycled) {
    v["cycle_entry"] = trace.verdict.cycle_entry;
    v["period"] = trace.verdict.period;
  }
  return v;
}

/// One JSON object per line: manifest, one record per move, then the verdict.
inline std::string trace_to_jsonl(const FlowGame& game, const DynamicsTrace& trace,
                                  const RunManifest& manifest) {
  std::string out = json{{"manifest", manifest_to_json(manifest)}}.dump() + "\n";
  for (std::size_t i = 0; i < trace.moves.size(); ++i) {
    json rec = move_to_json(game, trace.moves[i]);
    rec["step"] = i + 1;
    rec["potential"] = trace.potentials.empty() ? json(nullptr) : json(trace.potentials[i + 1].counts);
    out += rec.dump() + "\n";
  }
  out += verdict_to_json(trace).dump() + "\n";
  return out;
}

inline json equilibrium_report_to_json(const FlowGame& game, const EquilibriumReport& rep) {
  json j{{"is_equilibrium", rep.is_equilibrium},
         {"certification", to_string(rep.certification)}};
  j["witness"] = rep.witness ? move_to_json(game, *rep.witness) : json(nullptr);
  return j;
}

inline json structure_report_to_json(const StructureReport& rep) {
  auto check = [](const PropertyCheck& c) {
    return json{{"ok", c.ok}, {"witness", c.witness}};
  };
  return json{{"gamma", rep.gamma},
              {"gamma_method", rep.gamma_method == DoublingMethod::exact ? "exact" : "greedy"},
              {"r", rep.r},
              {"delta", rep.delta},
              {"covering", check(rep.covering)},
              {"regularity", check(rep.regularity)}};
}

}  // namespace flowgame
