#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

#include "csmmab/error.hpp"
#include "csmmab/export.hpp"
#include "csmmab/harness.hpp"

using namespace csmmab;

namespace {

ExperimentSpec small_spec(std::size_t reps) {
  ExperimentSpec spec;
  spec.scenario.n_users = 3;
  spec.scenario.n_channels = 4;
  spec.scenario.seed = 9;
  spec.engine.horizon = 8 * 300;
  spec.repetitions = reps;
  spec.master_seed = 4;
  return spec;
}

}  // namespace

TEST_CASE("single repetition aggregate has zero variance") {
  const auto res = run_experiment(small_spec(1));
  REQUIRE(res.runs.size() == 1);
  const auto& run = res.runs[0];
  CHECK(res.aggregate.t == run.t);
  for (std::size_t i = 0; i < run.t.size(); ++i) {
    CHECK(res.aggregate.phi_mean[i] == double(run.phi[i]));
    CHECK(res.aggregate.phi_var[i] == 0.0);
  }
}

TEST_CASE("default stride samples once per super frame") {
  const auto res = run_experiment(small_spec(2));
  CHECK(res.runs[0].t.size() == 300);
  CHECK(res.runs[0].t.front() == 8);
  CHECK(res.runs[0].t.back() == 2400);
  CHECK(res.catalog_enumerated);
}

TEST_CASE("full-length run with stride 24 gives 5000 rows") {
  ExperimentSpec spec;
  spec.scenario = two_cluster_scenario(3);
  spec.engine.horizon = 120000;
  spec.metrics_stride = 24;
  spec.repetitions = 1;
  const auto res = run_experiment(spec);
  std::ostringstream os;
  write_metrics_csv(res, os);
  std::istringstream is(os.str());
  CHECK(read_metrics_csv(is).size() == 5000);
}

TEST_CASE("worker count does not change results") {
  auto spec = small_spec(6);
  spec.workers = 1;
  const auto a = run_experiment(spec);
  spec.workers = 3;
  const auto b = run_experiment(spec);
  CHECK(a == b);
}

TEST_CASE("metric invariants") {
  auto spec = small_spec(4);
  spec.fresh_matrix = true;
  const auto res = run_experiment(spec);
  for (const auto& run : res.runs) {
    REQUIRE_FALSE(run.error);
    // cumulative reward non-decreasing, at most N per slot
    for (std::size_t i = 0; i < run.t.size(); ++i) {
      CHECK(run.cum_reward[i] <= run.t[i] * 3);
      if (i > 0) CHECK(run.cum_reward[i] >= run.cum_reward[i - 1]);
      if (i > 0) {
        for (std::size_t u = 0; u < 3; ++u) CHECK(run.policy_changes[i][u] >= run.policy_changes[i - 1][u]);
      }
    }
    // policy changes equal the engine's move events per user
    std::vector<std::uint64_t> from_moves(3, 0);
    for (const auto& mv : run.moves) {
      ++from_moves[mv.user];
      if (mv.partner) ++from_moves[*mv.partner];
    }
    CHECK(run.policy_changes.back() == from_moves);
    // smc id present exactly when the sampled assignment is stable
    const auto m = generate_scenario(repetition_scenario(spec, run.rep));
    for (std::size_t i = 0; i < run.t.size(); ++i) {
      CHECK(run.smc_id[i].has_value() == is_absorbing(m, run.assignments[i]));
    }
  }
}

TEST_CASE("stable fraction follows the change points") {
  RunMetrics r;
  r.horizon = 100;
  r.stability = {{1, false}, {31, true}, {61, false}, {81, true}};
  CHECK(stable_fraction(r, 0, 100) == doctest::Approx(0.5));
  CHECK(stable_fraction(r, 30, 60) == doctest::Approx(1.0));
  CHECK(stable_fraction(r, 60, 80) == doctest::Approx(0.0));
  CHECK(stable_fraction(r, 90, 100) == doctest::Approx(1.0));
}

TEST_CASE("oracle-stats potential settles to its final value") {
  auto spec = small_spec(5);
  spec.engine.oracle_stats = true;
  const auto res = run_experiment(spec);
  const auto& mean = res.aggregate.phi_mean;
  const auto m = generate_scenario(spec.scenario);
  for (const auto& run : res.runs) CHECK(is_absorbing(m, run.assignments.back()));
  std::size_t settle = mean.size() - 1;
  while (settle > 0 && mean[settle - 1] == mean.back()) --settle;
  CHECK(settle < mean.size() / 2);
}

TEST_CASE("exported aggregate matches recomputation from metrics.csv") {
  const auto res = run_experiment(small_spec(5));
  std::ostringstream os;
  write_metrics_csv(res, os);
  std::istringstream is(os.str());
  std::map<std::uint64_t, std::pair<double, double>> acc;  // sum, sum of squares
  std::map<std::uint64_t, int> count;
  for (const auto& row : read_metrics_csv(is)) {
    acc[row.t].first += double(row.phi);
    acc[row.t].second += double(row.phi) * double(row.phi);
    ++count[row.t];
  }
  for (std::size_t i = 0; i < res.aggregate.t.size(); ++i) {
    const auto t = res.aggregate.t[i];
    const double n = count[t];
    const double mean = acc[t].first / n;
    CHECK(res.aggregate.phi_mean[i] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(res.aggregate.phi_var[i] == doctest::Approx(acc[t].second / n - mean * mean).epsilon(1e-9));
  }
}

TEST_CASE("json round trip is exact") {
  auto spec = small_spec(3);
  spec.record_slots = true;
  spec.engine.horizon = 80;
  const auto res = run_experiment(spec);
  CHECK(results_from_json(results_to_json(res)) == res);
}

TEST_CASE("empty results export header-only files") {
  ExperimentResult empty;
  empty.n_users = 2;
  std::ostringstream m, p, a;
  write_metrics_csv(empty, m);
  write_policy_changes_csv(empty, p);
  write_aggregate_csv(empty.aggregate, a);
  CHECK(m.str() == "rep,t,phi,smc_id,cum_reward\n");
  CHECK(p.str() == "rep,t,user_1,user_2\n");
  CHECK(a.str() == "t,phi_mean,phi_var\n");
}

TEST_CASE("export writes files and reports io errors") {
  const auto dir = std::filesystem::temp_directory_path() / ("csmmab_unit_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  const auto res = run_experiment(small_spec(2));
  const auto files = export_results(res, ExportFormat::csv, dir);
  CHECK(files.size() == 4);
  for (const auto& f : files) CHECK(std::filesystem::exists(f));
  const auto json_files = export_results(res, ExportFormat::json, dir);
  REQUIRE(json_files.size() == 1);
  CHECK(read_results_json(json_files[0]) == res);
  std::ofstream(dir / "blocker") << "x";
  try {
    export_results(res, ExportFormat::csv, dir / "blocker");
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("failed repetitions are reported without aborting siblings") {
  auto spec = small_spec(3);
  spec.scenario.n_users = 4;
  spec.scenario.n_channels = 4;
  spec.engine.cfl_max_slots = 1;
  const auto res = run_experiment(spec);
  std::size_t failed = 0;
  for (const auto& r : res.runs) failed += r.error.has_value();
  CHECK(res.runs.size() == 3);
  CHECK(failed >= 1);
}
