// csmmab command-line front end: run, enumerate, bounds, scenario.

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "csmmab/bounds.hpp"
#include "csmmab/config.hpp"
#include "csmmab/error.hpp"
#include "csmmab/export.hpp"
#include "csmmab/format.hpp"
#include "csmmab/harness.hpp"
#include "csmmab/kernels.hpp"
#include "csmmab/oracle.hpp"

namespace {

using namespace csmmab;

constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitIo = 3;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return kExitUsage;
    case ErrorKind::io: return kExitIo;
    default: return kExitDomain;
  }
}

Stability parse_stability(const std::string& s) {
  return s == "pairwise" ? Stability::pairwise : Stability::absorbing;
}

struct RunOptions {
  std::string config;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> horizon;
  std::optional<std::string> mode;
  bool oracle_stats = false;
  std::optional<std::string> stability;
  std::optional<std::uint64_t> stride;
  std::string out = "results";
  std::string format = "csv";
  std::optional<std::size_t> workers;
  bool verbose_slots = false;
};

int cmd_run(const RunOptions& o) {
  ExperimentSpec spec = load_experiment_config(o.config);
  if (o.reps) spec.repetitions = *o.reps;
  if (o.seed) spec.master_seed = *o.seed;
  if (o.horizon) spec.engine.horizon = *o.horizon;
  if (o.mode) spec.scenario.mode = *o.mode == "random" ? ScenarioMode::random : ScenarioMode::clustered;
  if (o.oracle_stats) spec.engine.oracle_stats = true;
  if (o.stability) spec.stability_notion = parse_stability(*o.stability);
  if (o.stride) spec.metrics_stride = *o.stride;
  if (o.workers) spec.workers = *o.workers;
  if (o.verbose_slots) spec.record_slots = true;

  const ExperimentResult result = run_experiment(spec);
  const auto files = export_results(
      result, o.format == "json" ? ExportFormat::json : ExportFormat::csv, o.out);

  std::size_t failed = 0;
  double final_phi = 0.0;
  double tail_stable = 0.0;
  std::size_t ok = 0;
  for (const auto& r : result.runs) {
    if (r.error) {
      ++failed;
      std::cerr << "repetition " << r.rep + 1 << " failed: " << *r.error << '\n';
      continue;
    }
    ++ok;
    if (!r.phi.empty()) final_phi += static_cast<double>(r.phi.back());
    tail_stable += stable_fraction(r, r.horizon - r.horizon / 10, r.horizon);
  }
  std::cout << "repetitions " << result.runs.size() << " (failed " << failed << ")\n";
  if (ok > 0) {
    std::cout << "mean final potential " << format_double(final_phi / static_cast<double>(ok)) << '\n'
              << "mean stable fraction, last decile "
              << format_double(tail_stable / static_cast<double>(ok)) << '\n';
  }
  std::cout << "smc catalog " << (result.catalog_enumerated ? "enumerated" : "on the fly") << ", "
            << result.smc_catalog.size() << " entries\n";
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
  return failed == result.runs.size() ? kExitDomain : 0;
}

int cmd_enumerate(const std::string& config, const std::string& stability, std::uint64_t budget,
                  const std::string& out) {
  const ExperimentSpec spec = load_experiment_config(config);
  const RewardMatrix matrix = generate_scenario(spec.scenario);
  const auto smcs = enumerate_smcs(matrix, parse_stability(stability), budget);
  if (out.empty()) {
    write_assignments_csv(smcs, matrix.users(), std::cout);
  } else {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw Error(ErrorKind::io, "cannot write " + out);
    write_assignments_csv(smcs, matrix.users(), os);
    if (!os) throw Error(ErrorKind::io, "write failed for " + out);
    std::cout << smcs.size() << " stable configurations written to " << out << '\n';
  }
  return 0;
}

int cmd_scenario(const std::string& config, const std::string& out) {
  const ExperimentSpec spec = load_experiment_config(config);
  const RewardMatrix matrix = generate_scenario(spec.scenario);
  std::ofstream os(out, std::ios::binary);
  if (!os) throw Error(ErrorKind::io, "cannot write " + out);
  write_matrix_csv(matrix, os);
  if (!os) throw Error(ErrorKind::io, "write failed for " + out);
  return 0;
}

struct BoundsOptions {
  std::size_t k = 0;
  std::size_t n = 0;
  std::optional<double> epsilon;
  double delta_min = 0.1;
  double delta = 0.05;
  double delta1 = 0.1;
  std::optional<double> t_min;
};

int cmd_bounds(const BoundsOptions& o) {
  if (o.k == 0 || o.n == 0) throw Error(ErrorKind::usage, "--k and --n must be positive");
  const double eps = o.epsilon.value_or(1.0 / static_cast<double>(o.k));

  struct Row {
    std::string name;
    std::optional<double> value;
    std::string note;
  };
  std::vector<Row> rows;
  auto eval = [&](const std::string& name, const std::function<double()>& f) -> std::optional<double> {
    try {
      const double v = f();
      rows.push_back({name, v, {}});
      return v;
    } catch (const Error& e) {
      rows.push_back({name, std::nullopt, e.what()});
      return std::nullopt;
    }
  };

  eval("M = 16K/delta_min^2", [&] { return bounds::t_condition_threshold(o.k, o.delta_min); });
  const auto bound = eval("t_min bound", [&] { return bounds::t_min_bound(o.k, o.delta_min); });
  std::optional<double> t_min = o.t_min ? o.t_min : bound;
  if (o.t_min) rows.push_back({"t_min (given)", *o.t_min, {}});
  auto need_t_min = [&]() -> double {
    if (!t_min) throw Error(ErrorKind::domain, "t_min unavailable");
    return *t_min;
  };
  eval("s_min at t_min", [&] { return bounds::s_min(need_t_min(), o.delta_min); });
  eval("P_s = eps(1-eps)^(N-1)", [&] { return bounds::single_initiator_prob(eps, o.n); });
  const auto tp = eval("t' (delta1)", [&] { return bounds::t_prime(o.delta1, eps, o.n, o.k, need_t_min()); });
  const auto tau = eval("tau = t' N (K-1)", [&] {
    if (!tp) throw Error(ErrorKind::domain, "t' unavailable");
    return *tp * static_cast<double>(o.n * (o.k - 1));
  });
  const auto psmc = eval("P_SMC", [&] { return bounds::p_smc(o.delta1, need_t_min(), o.n, o.k); });
  eval("T (delta)", [&] {
    if (!tau || !psmc) throw Error(ErrorKind::domain, "tau or P_SMC unavailable");
    return bounds::convergence_time(o.delta, need_t_min(), *tau, *psmc);
  });
  eval("L = 4K/((K-1)(N-2))", [&] { return bounds::signalling_ratio(o.k, o.n); });

  std::cout << "K=" << o.k << " N=" << o.n << " epsilon=" << format_double(eps)
            << " delta_min=" << format_double(o.delta_min) << " delta=" << format_double(o.delta)
            << " delta1=" << format_double(o.delta1) << "\n";
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  for (const auto& r : rows) {
    std::cout << std::left << std::setw(static_cast<int>(width) + 2) << r.name;
    if (r.value) {
      std::ostringstream v;
      v << std::setprecision(10) << *r.value;
      std::cout << v.str();
    } else {
      std::cout << "undefined (" << r.note << ")";
    }
    std::cout << '\n';
  }

  nlohmann::json j;
  j["inputs"] = {{"K", o.k}, {"N", o.n}, {"epsilon", eps}, {"delta_min", o.delta_min},
                 {"delta", o.delta}, {"delta1", o.delta1}};
  for (const auto& r : rows) j["quantities"][r.name] = r.value ? nlohmann::json(*r.value) : nlohmann::json(nullptr);
  if (o.n >= 3 && o.k >= 2) {
    const auto f = bounds::signalling_ratio_exact(o.k, o.n);
    j["signalling_ratio_exact"] = std::to_string(f.num) + "/" + std::to_string(f.den);
  }
  std::cout << '\n' << j.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CSM-MAB multi-user bandit simulator"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "simulate repetitions and export metrics");
  run_cmd->add_option("--config", run.config, "experiment config (JSON)")->required();
  run_cmd->add_option("--reps", run.reps, "repetitions");
  run_cmd->add_option("--seed", run.seed, "master seed for the engine streams");
  run_cmd->add_option("--horizon", run.horizon, "protocol slots per repetition");
  run_cmd->add_option("--mode", run.mode, "scenario mode")->check(CLI::IsMember({"random", "clustered"}));
  run_cmd->add_flag("--oracle-stats", run.oracle_stats, "decide from true means");
  run_cmd->add_option("--stability", run.stability, "stability notion")
      ->check(CLI::IsMember({"pairwise", "absorbing"}));
  run_cmd->add_option("--stride", run.stride, "metrics sampling stride in slots");
  run_cmd->add_option("--out", run.out, "output directory");
  run_cmd->add_option("--format", run.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  run_cmd->add_option("--workers", run.workers, "parallel repetitions");
  run_cmd->add_flag("--verbose-slots", run.verbose_slots, "also export every slot");

  std::string enum_config;
  std::string enum_stability = "absorbing";
  std::uint64_t enum_budget = kDefaultEnumerationBudget;
  std::string enum_out;
  auto* enum_cmd = app.add_subcommand("enumerate", "list every stable configuration");
  enum_cmd->add_option("--config", enum_config, "scenario config (JSON)")->required();
  enum_cmd->add_option("--stability", enum_stability, "stability notion")
      ->check(CLI::IsMember({"pairwise", "absorbing"}));
  enum_cmd->add_option("--budget", enum_budget, "maximum assignments to scan");
  enum_cmd->add_option("--out", enum_out, "CSV output file (default stdout)");

  BoundsOptions bo;
  auto* bounds_cmd = app.add_subcommand("bounds", "print the analytic convergence quantities");
  bounds_cmd->add_option("--k", bo.k, "channels")->required();
  bounds_cmd->add_option("--n", bo.n, "users")->required();
  bounds_cmd->add_option("--epsilon", bo.epsilon, "initiator probability (default 1/K)");
  bounds_cmd->add_option("--delta-min", bo.delta_min, "minimal reward gap");
  bounds_cmd->add_option("--delta", bo.delta, "target failure probability");
  bounds_cmd->add_option("--delta1", bo.delta1, "per-change failure probability");
  bounds_cmd->add_option("--t-min", bo.t_min, "override the t_min bound");

  std::string sc_config;
  std::string sc_out;
  auto* sc_cmd = app.add_subcommand("scenario", "write the generated reward matrix as CSV");
  sc_cmd->add_option("--config", sc_config, "scenario config (JSON)")->required();
  sc_cmd->add_option("--out", sc_out, "CSV output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*enum_cmd) return cmd_enumerate(enum_config, enum_stability, enum_budget, enum_out);
    if (*bounds_cmd) return cmd_bounds(bo);
    if (*sc_cmd) return cmd_scenario(sc_config, sc_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}
