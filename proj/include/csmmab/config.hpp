#pragma once

// JSON configuration files. Ids in files are 1-based.

#include <filesystem>
#include <string>

#include "csmmab/harness.hpp"
#include "csmmab/model.hpp"

namespace csmmab {

/// {"scenario": {...}, "engine": {...}, "experiment": {...}}; only "scenario" is required.
ExperimentSpec parse_experiment_config(const std::string& text);
ExperimentSpec load_experiment_config(const std::filesystem::path& path);

std::string scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const std::string& text);

/// Full config including engine and experiment sections.
std::string experiment_to_json(const ExperimentSpec& spec);

}  // namespace csmmab
