#pragma once

// Experiment orchestration: repetitions, metrics, aggregation.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csmmab/engine.hpp"
#include "csmmab/model.hpp"
#include "csmmab/oracle.hpp"

namespace csmmab {

struct ExperimentSpec {
  ScenarioSpec scenario;
  EngineConfig engine;
  std::size_t repetitions = 1;
  std::uint64_t metrics_stride = 0;  // 0 = one sample per super frame
  Stability stability_notion = Stability::absorbing;
  bool fresh_matrix = false;  // redraw the reward matrix per repetition
  std::size_t workers = 1;
  std::uint64_t master_seed = 1;
  std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
  bool record_slots = false;

  std::uint64_t stride() const;  // resolved stride in slots
  void validate() const;
};

/// A change in stability status: from protocol slot `t` onward the
/// configuration is (not) stable.
struct StabilityChange {
  std::uint64_t t = 0;
  bool stable = false;
  friend bool operator==(const StabilityChange&, const StabilityChange&) = default;
};

/// One row of the verbose per-slot export.
struct SlotRow {
  std::uint64_t t = 0;
  std::string kind;
  std::vector<std::optional<std::size_t>> channels;
  std::vector<std::uint8_t> rewards;
  friend bool operator==(const SlotRow&, const SlotRow&) = default;
};

/// Time series of one repetition, sampled every `stride` protocol slots.
/// Timestamps count protocol slots after startup.
struct RunMetrics {
  std::size_t rep = 0;
  std::uint64_t horizon = 0;
  std::uint64_t startup_slots = 0;
  std::vector<std::uint64_t> t;
  std::vector<std::size_t> phi;
  std::vector<std::optional<std::size_t>> smc_id;
  std::vector<std::uint64_t> cum_reward;
  std::vector<std::vector<std::uint64_t>> policy_changes;  // [sample][user], cumulative
  std::vector<Assignment> assignments;                      // [sample]
  std::vector<StabilityChange> stability;
  std::vector<MoveEvent> moves;
  std::vector<SlotRow> slots;  // only with record_slots
  std::optional<std::string> error;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

struct Aggregate {
  std::vector<std::uint64_t> t;
  std::vector<double> phi_mean;
  std::vector<double> phi_var;  // population variance across repetitions
  std::size_t repetitions = 0;
  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct ExperimentResult {
  std::size_t n_users = 0;
  std::size_t n_channels = 0;
  std::vector<RunMetrics> runs;
  Aggregate aggregate;
  // fixed-matrix runs share one catalog (id i+1 <-> smc_catalog[i]); with
  // fresh matrices ids are local to each repetition and this stays empty
  std::vector<Assignment> smc_catalog;
  bool catalog_enumerated = false;
  friend bool operator==(const ExperimentResult&, const ExperimentResult&) = default;
};

/// Single repetition on a given matrix. Does not assign SMC ids.
RunMetrics run_repetition(const RewardMatrix& matrix, const ExperimentSpec& spec, std::size_t rep);

/// Seeds used by repetition `rep`.
std::uint64_t engine_seed(const ExperimentSpec& spec, std::size_t rep);
ScenarioSpec repetition_scenario(const ExperimentSpec& spec, std::size_t rep);

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// SMC identifiers. An enumerated catalog holds every stable assignment in
/// lexicographic order (id = 1-based position); an on-the-fly catalog checks
/// stability per lookup and numbers new configurations on first encounter.
class SmcCatalog {
 public:
  static SmcCatalog enumerated(const RewardMatrix& matrix, Stability notion,
                               std::uint64_t budget = kDefaultEnumerationBudget);
  static SmcCatalog on_the_fly(Stability notion);

  /// Id of `assignment`, or none if it is not stable.
  std::optional<std::size_t> id_of(const RewardMatrix& matrix,
                                   std::span<const std::size_t> assignment);

  bool is_enumerated() const noexcept { return enumerated_; }
  Stability notion() const noexcept { return notion_; }
  /// Entry i has id i + 1.
  const std::vector<Assignment>& entries() const noexcept { return entries_; }

 private:
  SmcCatalog(bool enumerated, Stability notion) : enumerated_(enumerated), notion_(notion) {}

  bool enumerated_;
  Stability notion_;
  std::vector<Assignment> entries_;
  std::map<Assignment, std::size_t> index_;
};

/// SMC id for every sample of `run`.
std::vector<std::optional<std::size_t>> smc_timeline(const RunMetrics& run,
                                                     const RewardMatrix& matrix,
                                                     SmcCatalog& catalog);

/// Mean and population variance of phi across the successful runs.
Aggregate aggregate_runs(const std::vector<RunMetrics>& runs);

/// Fraction of protocol slots in (from, to] spent in a stable configuration.
double stable_fraction(const RunMetrics& run, std::uint64_t from, std::uint64_t to);

/// Cumulative policy changes of all users at the sample with timestamp t (0 at t = 0).
std::uint64_t total_policy_changes_at(const RunMetrics& run, std::uint64_t t);

}  // namespace csmmab
