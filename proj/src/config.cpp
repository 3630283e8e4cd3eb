#include "csmmab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "csmmab/error.hpp"

namespace csmmab {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::usage, "config: " + what); }

void reject_unknown(const json& obj, const std::set<std::string>& known, const char* section) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) bad(std::string("unknown key '") + key + "' in " + section);
  }
}

template <typename T>
T get(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(std::string("bad value for '") + key + "': " + e.what());
  }
}

std::size_t to_index(std::int64_t one_based, const char* what) {
  if (one_based < 1) bad(std::string(what) + " ids are 1-based");
  return static_cast<std::size_t>(one_based - 1);
}

ValueRange get_range(const json& ranges, const char* key, ValueRange fallback) {
  if (!ranges.contains(key)) return fallback;
  const auto& r = ranges.at(key);
  if (!r.is_array() || r.size() != 2) bad(std::string("range '") + key + "' must be [lo, hi]");
  return {r[0].get<double>(), r[1].get<double>()};
}

ScenarioMode parse_mode(const std::string& s) {
  if (s == "random") return ScenarioMode::random;
  if (s == "clustered") return ScenarioMode::clustered;
  bad("mode must be 'random' or 'clustered'");
}

Stability parse_stability(const std::string& s) {
  if (s == "pairwise") return Stability::pairwise;
  if (s == "absorbing") return Stability::absorbing;
  bad("stability must be 'pairwise' or 'absorbing'");
}

ScenarioSpec scenario_from(const json& j) {
  if (!j.is_object()) bad("scenario must be an object");
  reject_unknown(j,
                 {"mode", "n_users", "n_channels", "seed", "cluster_assignment",
                  "interfered_channels", "ranges"},
                 "scenario");
  ScenarioSpec spec;
  spec.mode = parse_mode(get<std::string>(j, "mode", "random"));
  if (!j.contains("n_users") || !j.contains("n_channels")) bad("scenario needs n_users and n_channels");
  spec.n_users = get<std::size_t>(j, "n_users", 0);
  spec.n_channels = get<std::size_t>(j, "n_channels", 0);
  spec.seed = get<std::uint64_t>(j, "seed", 0);
  for (auto id : get<std::vector<std::int64_t>>(j, "cluster_assignment", {})) {
    spec.cluster_assignment.push_back(to_index(id, "cluster"));
  }
  for (const auto& set : get<std::vector<std::vector<std::int64_t>>>(j, "interfered_channels", {})) {
    auto& out = spec.interfered_channels.emplace_back();
    for (auto k : set) out.push_back(to_index(k, "channel"));
  }
  if (j.contains("ranges")) {
    const auto& r = j.at("ranges");
    reject_unknown(r, {"interfered", "clear", "uninterfered"}, "scenario.ranges");
    spec.interfered_range = get_range(r, "interfered", spec.interfered_range);
    spec.clear_range = get_range(r, "clear", spec.clear_range);
    spec.uninterfered_range = get_range(r, "uninterfered", spec.uninterfered_range);
  }
  return spec;
}

json scenario_json(const ScenarioSpec& spec) {
  json j;
  j["mode"] = spec.mode == ScenarioMode::random ? "random" : "clustered";
  j["n_users"] = spec.n_users;
  j["n_channels"] = spec.n_channels;
  j["seed"] = spec.seed;
  if (!spec.cluster_assignment.empty() || !spec.interfered_channels.empty()) {
    json clusters = json::array();
    for (auto c : spec.cluster_assignment) clusters.push_back(c + 1);
    json sets = json::array();
    for (const auto& set : spec.interfered_channels) {
      json s = json::array();
      for (auto k : set) s.push_back(k + 1);
      sets.push_back(s);
    }
    j["cluster_assignment"] = clusters;
    j["interfered_channels"] = sets;
  }
  j["ranges"] = {
      {"interfered", {spec.interfered_range.lo, spec.interfered_range.hi}},
      {"clear", {spec.clear_range.lo, spec.clear_range.hi}},
      {"uninterfered", {spec.uninterfered_range.lo, spec.uninterfered_range.hi}},
  };
  return j;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
}

}  // namespace

ScenarioSpec scenario_from_json(const std::string& text) {
  const json j = parse_text(text);
  return scenario_from(j.contains("scenario") ? j.at("scenario") : j);
}

std::string scenario_to_json(const ScenarioSpec& spec) {
  return json{{"scenario", scenario_json(spec)}}.dump(2) + "\n";
}

ExperimentSpec parse_experiment_config(const std::string& text) {
  const json j = parse_text(text);
  if (!j.is_object() || !j.contains("scenario")) bad("top level must be an object with 'scenario'");
  reject_unknown(j, {"scenario", "engine", "experiment"}, "config");

  ExperimentSpec spec;
  spec.scenario = scenario_from(j.at("scenario"));
  spec.engine.horizon = 120000;
  if (j.contains("engine")) {
    const auto& e = j.at("engine");
    reject_unknown(e, {"horizon", "epsilon", "oracle_stats", "cfl_max_slots"}, "engine");
    spec.engine.horizon = get<std::uint64_t>(e, "horizon", spec.engine.horizon);
    if (e.contains("epsilon") && !e.at("epsilon").is_null()) spec.engine.epsilon = get<double>(e, "epsilon", 0.0);
    spec.engine.oracle_stats = get<bool>(e, "oracle_stats", false);
    spec.engine.cfl_max_slots = get<std::uint64_t>(e, "cfl_max_slots", spec.engine.cfl_max_slots);
  }
  if (j.contains("experiment")) {
    const auto& x = j.at("experiment");
    reject_unknown(x,
                   {"repetitions", "stride", "stability", "fresh_matrix", "workers", "seed",
                    "enumeration_budget", "verbose_slots"},
                   "experiment");
    spec.repetitions = get<std::size_t>(x, "repetitions", spec.repetitions);
    spec.metrics_stride = get<std::uint64_t>(x, "stride", spec.metrics_stride);
    spec.stability_notion = parse_stability(get<std::string>(x, "stability", "absorbing"));
    spec.fresh_matrix = get<bool>(x, "fresh_matrix", false);
    spec.workers = get<std::size_t>(x, "workers", spec.workers);
    spec.master_seed = get<std::uint64_t>(x, "seed", spec.master_seed);
    spec.enumeration_budget = get<std::uint64_t>(x, "enumeration_budget", spec.enumeration_budget);
    spec.record_slots = get<bool>(x, "verbose_slots", false);
  }
  return spec;
}

ExperimentSpec load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

std::string experiment_to_json(const ExperimentSpec& spec) {
  json j;
  j["scenario"] = scenario_json(spec.scenario);
  j["engine"] = {
      {"horizon", spec.engine.horizon},
      {"epsilon", spec.engine.epsilon ? json(*spec.engine.epsilon) : json(nullptr)},
      {"oracle_stats", spec.engine.oracle_stats},
      {"cfl_max_slots", spec.engine.cfl_max_slots},
  };
  j["experiment"] = {
      {"repetitions", spec.repetitions},
      {"stride", spec.metrics_stride},
      {"stability", spec.stability_notion == Stability::pairwise ? "pairwise" : "absorbing"},
      {"fresh_matrix", spec.fresh_matrix},
      {"workers", spec.workers},
      {"seed", spec.master_seed},
      {"enumeration_budget", spec.enumeration_budget},
      {"verbose_slots", spec.record_slots},
  };
  return j.dump(2) + "\n";
}

}  // namespace csmmab
