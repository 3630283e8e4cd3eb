#include <doctest.h>

#include "csmmab/config.hpp"
#include "csmmab/error.hpp"

using namespace csmmab;

TEST_CASE("config parsing with 1-based ids") {
  const auto spec = parse_experiment_config(R"({
    "scenario": {"mode": "clustered", "n_users": 3, "n_channels": 4, "seed": 5,
                 "cluster_assignment": [1, 1, 2], "interfered_channels": [[3, 4], []]},
    "engine": {"horizon": 800, "epsilon": 0.5, "oracle_stats": true},
    "experiment": {"repetitions": 7, "stride": 16, "stability": "pairwise", "workers": 2, "seed": 3}
  })");
  CHECK(spec.scenario.mode == ScenarioMode::clustered);
  CHECK(spec.scenario.cluster_assignment == std::vector<std::size_t>{0, 0, 1});
  CHECK(spec.scenario.interfered_channels[0] == std::vector<std::size_t>{2, 3});
  CHECK(spec.engine.horizon == 800);
  CHECK(spec.engine.epsilon == 0.5);
  CHECK(spec.engine.oracle_stats);
  CHECK(spec.repetitions == 7);
  CHECK(spec.metrics_stride == 16);
  CHECK(spec.stability_notion == Stability::pairwise);
  CHECK(spec.workers == 2);
  CHECK(spec.master_seed == 3);
}

TEST_CASE("defaults") {
  const auto spec = parse_experiment_config(R"({"scenario": {"n_users": 2, "n_channels": 3}})");
  CHECK(spec.scenario.mode == ScenarioMode::random);
  CHECK(spec.engine.horizon == 120000);
  CHECK_FALSE(spec.engine.epsilon);
  CHECK(spec.repetitions == 1);
  CHECK(spec.stability_notion == Stability::absorbing);
}

TEST_CASE("round trip") {
  auto spec = parse_experiment_config(R"({"scenario": {"n_users": 2, "n_channels": 3, "seed": 8}})");
  spec.scenario = two_cluster_scenario(11);
  spec.engine.epsilon = 0.25;
  spec.repetitions = 3;
  spec.fresh_matrix = true;
  const auto back = parse_experiment_config(experiment_to_json(spec));
  CHECK(back.scenario == spec.scenario);
  CHECK(back.engine.epsilon == spec.engine.epsilon);
  CHECK(back.engine.horizon == spec.engine.horizon);
  CHECK(back.repetitions == 3);
  CHECK(back.fresh_matrix);
  CHECK(scenario_from_json(scenario_to_json(spec.scenario)) == spec.scenario);
}

TEST_CASE("bad configs") {
  auto kind = [](const char* text) {
    try {
      parse_experiment_config(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::io;  // sentinel: no error
  };
  CHECK(kind("not json") == ErrorKind::usage);
  CHECK(kind(R"({"scenario": {"n_users": 2}})") == ErrorKind::usage);
  CHECK(kind(R"({"scenario": {"n_users": 2, "n_channels": 3, "colour": 1}})") == ErrorKind::usage);
  CHECK(kind(R"({"scenario": {"n_users": 2, "n_channels": 3, "cluster_assignment": [0, 1]}})") ==
        ErrorKind::usage);
  CHECK_THROWS_AS(load_experiment_config("/nonexistent/x.json"), Error);
}
