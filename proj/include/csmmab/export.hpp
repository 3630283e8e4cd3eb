#pragma once

// Result files.
//
// CSV (all ids 1-based, empty cell = none):
//   metrics.csv         rep,t,phi,smc_id,cum_reward
//   policy_changes.csv  rep,t,user_1..user_N       (cumulative counts)
//   aggregate.csv       t,phi_mean,phi_var
//   runs.csv            rep,startup_slots,moves,final_phi,stable_last_decile,final_assignment,error
//   slots.csv           rep,t,kind,ch_1..ch_N,r_1..r_N  (only with verbose slots)
// JSON: results.json holds the whole ExperimentResult and reads back exactly.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "csmmab/format.hpp"
#include "csmmab/harness.hpp"
#include "csmmab/oracle.hpp"

namespace csmmab {

enum class ExportFormat { csv, json };

/// Writes the files above into `dir` (created if needed). Returns the paths written.
std::vector<std::filesystem::path> export_results(const ExperimentResult& result,
                                                  ExportFormat format,
                                                  const std::filesystem::path& dir);

void write_metrics_csv(const ExperimentResult& result, std::ostream& os);
void write_policy_changes_csv(const ExperimentResult& result, std::ostream& os);
void write_aggregate_csv(const Aggregate& aggregate, std::ostream& os);
void write_runs_csv(const ExperimentResult& result, std::ostream& os);
void write_slots_csv(const ExperimentResult& result, std::ostream& os);

std::string results_to_json(const ExperimentResult& result);
ExperimentResult results_from_json(const std::string& text);
ExperimentResult read_results_json(const std::filesystem::path& path);

/// Parsed metrics.csv row.
struct MetricsRow {
  std::size_t rep = 0;
  std::uint64_t t = 0;
  std::size_t phi = 0;
  std::optional<std::size_t> smc_id;
  std::uint64_t cum_reward = 0;
};
std::vector<MetricsRow> read_metrics_csv(std::istream& is);

/// Catalog CSV: smc_id,user_1..user_N (channel ids).
void write_assignments_csv(std::span<const Assignment> assignments, std::size_t n_users,
                           std::ostream& os);

}  // namespace csmmab
