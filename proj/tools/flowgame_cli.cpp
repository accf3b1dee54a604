#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "flowgame/flowgame.hpp"

using namespace flowgame;

namespace {

enum Exit { ok = 0, usage = 1, cycled = 2, step_limit = 3, verification = 4 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

/// "a" or "a..b", inclusive.
std::vector<std::int64_t> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) return {std::stoll(text)};
    const auto lo = std::stoll(text.substr(0, dots));
    const auto hi = std::stoll(text.substr(dots + 2));
    if (hi < lo) throw Error("empty range " + text);
    std::vector<std::int64_t> out;
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  } catch (const std::logic_error&) {
    throw Error("bad range '" + text + "' (expected N or A..B)");
  }
}

SearchMode search_mode(const std::string& s) {
  if (s == "swap") return SearchMode::swap;
  if (s == "exhaustive") return SearchMode::exhaustive;
  if (s == "greedy") return SearchMode::greedy;
  return SearchMode::restricted;
}

const std::vector<std::string> kSearchModes{"swap", "exhaustive", "greedy", "restricted"};

struct Loaded {
  FlowGame game;
  ConfigurationDocument doc;
};

Loaded load(const std::string& instance_path, const std::string& config_path) {
  FlowGame game = load_instance(read_file(instance_path));
  ConfigurationDocument doc{Configuration(game.n()), {}};
  if (!config_path.empty()) doc = load_configuration(game, read_file(config_path));
  return {std::move(game), std::move(doc)};
}

// ---------------------------------------------------------------------------

struct RunArgs {
  std::string instance, config, scheduler = "round-robin", search = "exhaustive", out;
  std::uint64_t seed = 0;
  std::size_t max_steps = 100'000;
};

int cmd_run(const RunArgs& a) {
  const auto [game, doc] = load(a.instance, a.config);
  SearchOptions search;
  search.mode = search_mode(a.search);
  search.candidates = doc.candidates;
  const Scheduler scheduler{a.scheduler == "random" ? SchedulerKind::random
                                                    : SchedulerKind::round_robin,
                            a.seed};
  const auto trace = run_dynamics(game, doc.config, scheduler, search, {a.max_steps, 0});

  RunManifest m;
  m.command = "run";
  m.instance_hash = instance_hash(game);
  m.seed = a.seed;
  m.search = a.search;
  m.scheduler = a.scheduler;
  m.limits = {{"max_steps", static_cast<std::int64_t>(a.max_steps)}};
  write_output(a.out, trace_to_jsonl(game, trace, m));

  switch (trace.verdict.kind) {
    case Verdict::Kind::converged: return ok;
    case Verdict::Kind::cycled: return cycled;
    case Verdict::Kind::step_limit: return step_limit;
  }
  return usage;
}

struct VerifyArgs {
  std::string instance, config, search = "exhaustive", out;
};

int cmd_verify(const VerifyArgs& a) {
  const auto [game, doc] = load(a.instance, a.config);
  SearchOptions search;
  search.mode = search_mode(a.search);
  search.candidates = doc.candidates;
  const auto rep = is_equilibrium(game, doc.config, search);

  RunManifest m;
  m.command = "verify";
  m.instance_hash = instance_hash(game);
  m.search = a.search;
  json out{{"manifest", manifest_to_json(m)},
           {"report", equilibrium_report_to_json(game, rep)},
           {"welfare", global_welfare(game, doc.config)}};
  write_output(a.out, out.dump(2) + "\n");
  return rep.is_equilibrium ? ok : verification;
}

struct PoaArgs {
  std::string family, n = "4..8", k = "3", delta = "2", p = "6", budget = "3", seeds = "0", out;
};

int cmd_poa(const PoaArgs& a) {
  RunManifest m;
  m.command = "poa " + a.family;
  if (a.family == "het_poa") m.command += " --k " + a.k + " --delta " + a.delta;
  else m.command += " --n " + a.n;
  if (a.family == "random_homogeneous")
    m.command += " --p " + a.p + " --budget " + a.budget + " --seeds " + a.seeds;
  m.search = "exhaustive";
  m.scheduler = "round-robin";
  std::string rows = "family,params,welfare_eq,welfare_bench,ratio\n";
  auto row = [&](const std::string& params, Value eq, Value bench) {
    rows += a.family + "," + params + "," + std::to_string(eq) + "," + std::to_string(bench) +
            "," + to_string(poa_ratio({eq}, bench)) + "\n";
  };

  if (a.family == "chain_vs_ring") {
    for (auto n : parse_range(a.n)) {
      const auto s = scenarios::gen_chain_vs_ring(static_cast<std::size_t>(n));
      row("n=" + std::to_string(n), global_welfare(s.game, s.chain), global_welfare(s.game, s.ring));
    }
  } else if (a.family == "het_poa") {
    for (auto k : parse_range(a.k))
      for (auto d : parse_range(a.delta)) {
        const auto s = scenarios::gen_het_poa(static_cast<std::size_t>(k), static_cast<int>(d));
        row("k=" + std::to_string(k) + " delta=" + std::to_string(d),
            global_welfare(s.game, s.equilibrium), global_welfare(s.game, s.benchmark));
      }
  } else if (a.family == "random_homogeneous") {
    const auto budgets = parse_range(a.budget);
    for (auto n : parse_range(a.n))
      for (auto p : parse_range(a.p))
        for (auto seed : parse_range(a.seeds)) {
          const auto game = scenarios::gen_random_homogeneous(
              static_cast<std::size_t>(n), static_cast<std::size_t>(p),
              static_cast<int>(budgets.front()), static_cast<int>(budgets.back()),
              static_cast<std::uint64_t>(seed));
          std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
          const auto start = scenarios::random_configuration(game, rng);
          const auto trace = run_dynamics(game, start, {SchedulerKind::round_robin, 0}, {});
          if (trace.verdict.kind != Verdict::Kind::converged)
            throw Error("random_homogeneous: dynamics did not converge");
          row("n=" + std::to_string(n) + " p=" + std::to_string(p) +
                  " seed=" + std::to_string(seed),
              global_welfare(game, trace.final),
              global_welfare(game, homogeneous_benchmark(game)));
        }
  } else {
    throw Error("unknown family '" + a.family + "'");
  }
  write_output(a.out, "# " + manifest_to_json(m).dump() + "\n" + rows);
  return ok;
}

struct ConstructArgs {
  std::string instance, out;
  Distance r = 1;
};

int cmd_construct(const ConstructArgs& a) {
  const FlowGame game = load_instance(read_file(a.instance));
  RunManifest m;
  m.command = "construct";
  m.instance_hash = instance_hash(game);
  m.limits = {{"r", a.r}};
  json out{{"manifest", manifest_to_json(m)}};
  int code = ok;
  try {
    const auto c = build_optimal_configuration(game, a.r);
    out["report"] = structure_report_to_json(c.report);
    out["configuration"] = configuration_to_json(game, c.config);
    json bounds = json::object();
    for (std::size_t u = 0; u < game.n(); ++u)
      bounds[std::to_string(game.user(u).id.value)] = c.degree_bound[u];
    out["degree_bound"] = bounds;
    out["welfare"] = global_welfare(game, c.config);
  } catch (const ConstructionError& e) {
    out["report"] = structure_report_to_json(structure_report(game, a.r));
    out["error"] = e.what();
    code = verification;
  }
  write_output(a.out, out.dump(2) + "\n");
  return code;
}

struct ScenarioArgs {
  std::string family, variant, emit, emit_config;
  std::size_t n = 6, k = 3, side = 3;
  int delta = 2;
  Distance radius = 0, r = 1;
};

int cmd_scenario(const ScenarioArgs& a) {
  std::optional<FlowGame> game;
  json config;
  const bool want_config = !a.emit_config.empty();
  if (a.family == "chain" || a.family == "ring") {
    auto s = scenarios::gen_chain_vs_ring(a.n);
    if (want_config) config = configuration_to_json(s.game, a.family == "chain" ? s.chain : s.ring);
    game = std::move(s.game);
  } else if (a.family == "four_cycle") {
    auto s = scenarios::gen_four_cycle_game();
    if (want_config) config = configuration_to_json(s.game, s.state(s.A, s.C));
    game = std::move(s.game);
  } else if (a.family == "het_poa") {
    auto s = scenarios::gen_het_poa(a.k, a.delta);
    if (want_config)
      config = configuration_to_json(s.game, a.variant == "benchmark" ? s.benchmark : s.equilibrium);
    game = std::move(s.game);
  } else if (a.family == "instability") {
    auto s = scenarios::gen_instability();
    if (want_config) config = configuration_to_json(s.game, s.initial, s.candidates);
    game = std::move(s.game);
  } else if (a.family == "grid") {
    game = scenarios::gen_grid_metric(a.side, a.radius > 0 ? a.radius : Distance(a.side), a.r);
    if (want_config) config = configuration_to_json(*game, Configuration(game->n()));
  } else {
    throw Error("unknown scenario family '" + a.family + "'");
  }
  write_output(a.emit, serialize_instance(*game));
  if (want_config) write_output(a.emit_config, config.dump(2) + "\n");
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selfish information-flow games: dynamics, equilibria and constructions"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run selfish dynamics and write a JSON-lines trace");
  run_cmd->add_option("--instance", run.instance, "Instance JSON")->required();
  run_cmd->add_option("--config", run.config, "Initial configuration JSON (default: empty)");
  run_cmd->add_option("--scheduler", run.scheduler)
      ->check(CLI::IsMember({"round-robin", "random"}));
  run_cmd->add_option("--search", run.search)->check(CLI::IsMember(kSearchModes));
  run_cmd->add_option("--seed", run.seed);
  run_cmd->add_option("--max-steps", run.max_steps);
  run_cmd->add_option("--out", run.out, "Output path (default: stdout)");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check whether a configuration is an equilibrium");
  verify_cmd->add_option("--instance", verify.instance)->required();
  verify_cmd->add_option("--config", verify.config)->required();
  verify_cmd->add_option("--search", verify.search)->check(CLI::IsMember(kSearchModes));
  verify_cmd->add_option("--out", verify.out);

  PoaArgs poa;
  auto* poa_cmd = app.add_subcommand("poa", "Sweep a family and print welfare ratios as CSV");
  poa_cmd->add_option("family", poa.family)
      ->required()
      ->check(CLI::IsMember({"chain_vs_ring", "het_poa", "random_homogeneous"}));
  poa_cmd->add_option("--n", poa.n, "Users (chain_vs_ring, random_homogeneous)");
  poa_cmd->add_option("--k", poa.k, "Pairs (het_poa)");
  poa_cmd->add_option("--delta", poa.delta, "Budget (het_poa)");
  poa_cmd->add_option("--p", poa.p, "Producers (random_homogeneous)");
  poa_cmd->add_option("--budget", poa.budget, "Budget range (random_homogeneous)");
  poa_cmd->add_option("--seeds", poa.seeds, "Seed range (random_homogeneous)");
  poa_cmd->add_option("--out", poa.out);

  ConstructArgs construct;
  auto* construct_cmd =
      app.add_subcommand("construct", "Build the multi-scale configuration for a metric game");
  construct_cmd->add_option("--instance", construct.instance)->required();
  construct_cmd->add_option("--r", construct.r)->check(CLI::PositiveNumber);
  construct_cmd->add_option("--out", construct.out);

  ScenarioArgs scenario;
  auto* scenario_cmd = app.add_subcommand("scenario", "Emit a generated instance");
  scenario_cmd->add_option("family", scenario.family)
      ->required()
      ->check(CLI::IsMember({"chain", "ring", "four_cycle", "het_poa", "instability", "grid"}));
  scenario_cmd->add_option("--n", scenario.n);
  scenario_cmd->add_option("--k", scenario.k);
  scenario_cmd->add_option("--delta", scenario.delta);
  scenario_cmd->add_option("--side", scenario.side);
  scenario_cmd->add_option("--radius", scenario.radius, "Interest radius (grid, default side)");
  scenario_cmd->add_option("--r", scenario.r);
  scenario_cmd->add_option("--variant", scenario.variant, "het_poa: benchmark or equilibrium")
      ->check(CLI::IsMember({"benchmark", "equilibrium"}));
  scenario_cmd->add_option("--emit", scenario.emit, "Instance output path")->required();
  scenario_cmd->add_option("--emit-config", scenario.emit_config, "Configuration output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*verify_cmd) return cmd_verify(verify);
    if (*poa_cmd) return cmd_poa(poa);
    if (*construct_cmd) return cmd_construct(construct);
    if (*scenario_cmd) return cmd_scenario(scenario);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  }
  return usage;
}
