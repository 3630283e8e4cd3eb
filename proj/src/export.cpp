#include "csmmab/export.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "csmmab/error.hpp"

namespace csmmab {
namespace {

using nlohmann::json;

std::string opt_id(const std::optional<std::size_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

std::string assignment_text(const Assignment& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(a[i] + 1);
  }
  return s;
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

json move_json(const MoveEvent& e) {
  return {{"t", e.t},       {"super_frame", e.super_frame}, {"user", e.user},
          {"from", e.from}, {"to", e.to},                   {"partner", optional_json(e.partner)}};
}

MoveEvent move_from(const json& j) {
  return {j.at("t").get<std::uint64_t>(),     j.at("super_frame").get<std::uint64_t>(),
          j.at("user").get<std::size_t>(),    j.at("from").get<std::size_t>(),
          j.at("to").get<std::size_t>(),      optional_from<std::size_t>(j.at("partner"))};
}

json run_json(const RunMetrics& r) {
  json smc = json::array();
  for (const auto& id : r.smc_id) smc.push_back(optional_json(id));
  json stability = json::array();
  for (const auto& c : r.stability) stability.push_back({c.t, c.stable});
  json moves = json::array();
  for (const auto& m : r.moves) moves.push_back(move_json(m));
  json slots = json::array();
  for (const auto& s : r.slots) {
    json ch = json::array();
    for (const auto& c : s.channels) ch.push_back(optional_json(c));
    slots.push_back({{"t", s.t}, {"kind", s.kind}, {"channels", ch}, {"rewards", s.rewards}});
  }
  return {{"rep", r.rep},
          {"horizon", r.horizon},
          {"startup_slots", r.startup_slots},
          {"t", r.t},
          {"phi", r.phi},
          {"smc_id", smc},
          {"cum_reward", r.cum_reward},
          {"policy_changes", r.policy_changes},
          {"assignments", r.assignments},
          {"stability", stability},
          {"moves", moves},
          {"slots", slots},
          {"error", optional_json(r.error)}};
}

RunMetrics run_from(const json& j) {
  RunMetrics r;
  r.rep = j.at("rep").get<std::size_t>();
  r.horizon = j.at("horizon").get<std::uint64_t>();
  r.startup_slots = j.at("startup_slots").get<std::uint64_t>();
  r.t = j.at("t").get<std::vector<std::uint64_t>>();
  r.phi = j.at("phi").get<std::vector<std::size_t>>();
  for (const auto& id : j.at("smc_id")) r.smc_id.push_back(optional_from<std::size_t>(id));
  r.cum_reward = j.at("cum_reward").get<std::vector<std::uint64_t>>();
  r.policy_changes = j.at("policy_changes").get<std::vector<std::vector<std::uint64_t>>>();
  r.assignments = j.at("assignments").get<std::vector<Assignment>>();
  for (const auto& c : j.at("stability")) {
    r.stability.push_back({c.at(0).get<std::uint64_t>(), c.at(1).get<bool>()});
  }
  for (const auto& m : j.at("moves")) r.moves.push_back(move_from(m));
  for (const auto& s : j.at("slots")) {
    SlotRow row;
    row.t = s.at("t").get<std::uint64_t>();
    row.kind = s.at("kind").get<std::string>();
    for (const auto& c : s.at("channels")) row.channels.push_back(optional_from<std::size_t>(c));
    row.rewards = s.at("rewards").get<std::vector<std::uint8_t>>();
    r.slots.push_back(std::move(row));
  }
  r.error = optional_from<std::string>(j.at("error"));
  return r;
}

}  // namespace

void write_metrics_csv(const ExperimentResult& result, std::ostream& os) {
  os << "rep,t,phi,smc_id,cum_reward\n";
  for (const auto& r : result.runs) {
    for (std::size_t i = 0; i < r.t.size(); ++i) {
      os << r.rep + 1 << ',' << r.t[i] << ',' << r.phi[i] << ','
         << opt_id(i < r.smc_id.size() ? r.smc_id[i] : std::nullopt) << ',' << r.cum_reward[i]
         << '\n';
    }
  }
}

void write_policy_changes_csv(const ExperimentResult& result, std::ostream& os) {
  os << "rep,t";
  for (std::size_t u = 0; u < result.n_users; ++u) os << ",user_" << u + 1;
  os << '\n';
  for (const auto& r : result.runs) {
    for (std::size_t i = 0; i < r.t.size(); ++i) {
      os << r.rep + 1 << ',' << r.t[i];
      for (auto c : r.policy_changes[i]) os << ',' << c;
      os << '\n';
    }
  }
}

void write_aggregate_csv(const Aggregate& aggregate, std::ostream& os) {
  os << "t,phi_mean,phi_var\n";
  for (std::size_t i = 0; i < aggregate.t.size(); ++i) {
    os << aggregate.t[i] << ',' << format_double(aggregate.phi_mean[i]) << ','
       << format_double(aggregate.phi_var[i]) << '\n';
  }
}

void write_runs_csv(const ExperimentResult& result, std::ostream& os) {
  os << "rep,startup_slots,moves,final_phi,stable_last_decile,final_assignment,error\n";
  for (const auto& r : result.runs) {
    os << r.rep + 1 << ',' << r.startup_slots << ',' << r.moves.size() << ',';
    if (!r.phi.empty()) os << r.phi.back();
    os << ',';
    if (!r.error && r.horizon >= 10) {
      os << format_double(stable_fraction(r, r.horizon - r.horizon / 10, r.horizon));
    }
    os << ',';
    if (!r.assignments.empty()) os << assignment_text(r.assignments.back());
    os << ',';
    if (r.error) {
      std::string msg = *r.error;
      for (char& c : msg) {
        if (c == ',' || c == '\n') c = ';';
      }
      os << msg;
    }
    os << '\n';
  }
}

void write_slots_csv(const ExperimentResult& result, std::ostream& os) {
  os << "rep,t,kind";
  for (std::size_t u = 0; u < result.n_users; ++u) os << ",ch_" << u + 1;
  for (std::size_t u = 0; u < result.n_users; ++u) os << ",r_" << u + 1;
  os << '\n';
  for (const auto& r : result.runs) {
    for (const auto& s : r.slots) {
      os << r.rep + 1 << ',' << s.t << ',' << s.kind;
      for (const auto& c : s.channels) os << ',' << (c ? std::to_string(*c + 1) : std::string());
      for (auto v : s.rewards) os << ',' << static_cast<int>(v);
      os << '\n';
    }
  }
}

void write_assignments_csv(std::span<const Assignment> assignments, std::size_t n_users,
                           std::ostream& os) {
  os << "smc_id";
  for (std::size_t u = 0; u < n_users; ++u) os << ",user_" << u + 1;
  os << '\n';
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    os << i + 1;
    for (auto c : assignments[i]) os << ',' << c + 1;
    os << '\n';
  }
}

std::string results_to_json(const ExperimentResult& result) {
  json runs = json::array();
  for (const auto& r : result.runs) runs.push_back(run_json(r));
  json j = {
      {"n_users", result.n_users},
      {"n_channels", result.n_channels},
      {"catalog_enumerated", result.catalog_enumerated},
      {"smc_catalog", result.smc_catalog},
      {"aggregate",
       {{"repetitions", result.aggregate.repetitions},
        {"t", result.aggregate.t},
        {"phi_mean", result.aggregate.phi_mean},
        {"phi_var", result.aggregate.phi_var}}},
      {"runs", runs},
  };
  return j.dump() + "\n";
}

ExperimentResult results_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    ExperimentResult result;
    result.n_users = j.at("n_users").get<std::size_t>();
    result.n_channels = j.at("n_channels").get<std::size_t>();
    result.catalog_enumerated = j.at("catalog_enumerated").get<bool>();
    result.smc_catalog = j.at("smc_catalog").get<std::vector<Assignment>>();
    const auto& a = j.at("aggregate");
    result.aggregate.repetitions = a.at("repetitions").get<std::size_t>();
    result.aggregate.t = a.at("t").get<std::vector<std::uint64_t>>();
    result.aggregate.phi_mean = a.at("phi_mean").get<std::vector<double>>();
    result.aggregate.phi_var = a.at("phi_var").get<std::vector<double>>();
    for (const auto& r : j.at("runs")) result.runs.push_back(run_from(r));
    return result;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, std::string("malformed results JSON: ") + e.what());
  }
}

ExperimentResult read_results_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return results_from_json(ss.str());
}

std::vector<MetricsRow> read_metrics_csv(std::istream& is) {
  std::vector<MetricsRow> rows;
  std::string line;
  if (!std::getline(is, line)) return rows;
  if (line != "rep,t,phi,smc_id,cum_reward") throw Error(ErrorKind::io, "unexpected metrics header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != 5) throw Error(ErrorKind::io, "malformed metrics row: " + line);
    MetricsRow row;
    row.rep = std::stoull(cells[0]) - 1;
    row.t = std::stoull(cells[1]);
    row.phi = std::stoull(cells[2]);
    if (!cells[3].empty()) row.smc_id = std::stoull(cells[3]);
    row.cum_reward = std::stoull(cells[4]);
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::filesystem::path> export_results(const ExperimentResult& result,
                                                  ExportFormat format,
                                                  const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto emit = [&](const char* name, auto&& writer) {
    const auto path = dir / name;
    std::ofstream out = open_out(path);
    writer(out);
    close_checked(out, path);
    written.push_back(path);
  };
  if (format == ExportFormat::json) {
    emit("results.json", [&](std::ostream& os) { os << results_to_json(result); });
    return written;
  }
  emit("metrics.csv", [&](std::ostream& os) { write_metrics_csv(result, os); });
  emit("policy_changes.csv", [&](std::ostream& os) { write_policy_changes_csv(result, os); });
  emit("aggregate.csv", [&](std::ostream& os) { write_aggregate_csv(result.aggregate, os); });
  emit("runs.csv", [&](std::ostream& os) { write_runs_csv(result, os); });
  bool any_slots = false;
  for (const auto& r : result.runs) any_slots = any_slots || !r.slots.empty();
  if (any_slots) emit("slots.csv", [&](std::ostream& os) { write_slots_csv(result, os); });
  return written;
}

}  // namespace csmmab
