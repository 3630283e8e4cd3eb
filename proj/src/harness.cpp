#include "csmmab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <string>
#include <thread>

#include "csmmab/error.hpp"

namespace csmmab {

std::uint64_t ExperimentSpec::stride() const {
  return metrics_stride == 0 ? 2 * scenario.n_channels : metrics_stride;
}

void ExperimentSpec::validate() const {
  if (repetitions == 0) throw Error(ErrorKind::domain, "repetitions must be at least 1");
  if (workers == 0) throw Error(ErrorKind::domain, "workers must be at least 1");
  if (scenario.n_channels < scenario.n_users || scenario.n_users == 0) {
    throw Error(ErrorKind::invalid_scenario, "scenario needs 1 <= N <= K");
  }
  engine.validate(scenario.n_channels);
}

std::uint64_t engine_seed(const ExperimentSpec& spec, std::size_t rep) {
  return derive_seed(spec.master_seed, rep);
}

ScenarioSpec repetition_scenario(const ExperimentSpec& spec, std::size_t rep) {
  ScenarioSpec scenario = spec.scenario;
  if (spec.fresh_matrix) scenario.seed = derive_seed(spec.scenario.seed, rep);
  return scenario;
}

namespace {

class MetricsObserver final : public SimulationObserver {
 public:
  MetricsObserver(const RewardMatrix& matrix, const ExperimentSpec& spec, RunMetrics& out)
      : matrix_(matrix),
        notion_(spec.stability_notion),
        stride_(spec.stride()),
        record_slots_(spec.record_slots),
        out_(out),
        changes_(matrix.users(), 0) {
    const std::uint64_t samples = spec.engine.horizon / stride_;
    out_.t.reserve(samples);
    out_.phi.reserve(samples);
    out_.cum_reward.reserve(samples);
    out_.policy_changes.reserve(samples);
    out_.assignments.reserve(samples);
  }

  void on_slot(const SlotRecord& rec, SlotLabel label,
               std::span<const std::size_t> assignment) override {
    if (record_slots_) {
      out_.slots.push_back({rec.t, to_string(label), rec.transmissions, rec.rewards});
    }
    if (label.kind == SlotKind::startup) return;
    ++protocol_t_;
    for (auto r : rec.rewards) cum_reward_ += r;
    if (dirty_) {
      phi_ = system_potential(matrix_, assignment);
      const bool stable = is_stable(matrix_, assignment, notion_);
      if (out_.stability.empty() || out_.stability.back().stable != stable) {
        out_.stability.push_back({protocol_t_, stable});
      }
      dirty_ = false;
    }
    if (protocol_t_ % stride_ == 0) {
      out_.t.push_back(protocol_t_);
      out_.phi.push_back(phi_);
      out_.smc_id.push_back(std::nullopt);
      out_.cum_reward.push_back(cum_reward_);
      out_.policy_changes.push_back(changes_);
      out_.assignments.emplace_back(assignment.begin(), assignment.end());
    }
  }

  void on_move(const MoveEvent& event) override {
    ++changes_[event.user];
    if (event.partner) ++changes_[*event.partner];
    dirty_ = true;
  }

 private:
  const RewardMatrix& matrix_;
  Stability notion_;
  std::uint64_t stride_;
  bool record_slots_;
  RunMetrics& out_;
  std::vector<std::uint64_t> changes_;
  std::uint64_t protocol_t_ = 0;
  std::uint64_t cum_reward_ = 0;
  std::size_t phi_ = 0;
  bool dirty_ = true;
};

}  // namespace

RunMetrics run_repetition(const RewardMatrix& matrix, const ExperimentSpec& spec, std::size_t rep) {
  RunMetrics metrics;
  metrics.rep = rep;
  metrics.horizon = spec.engine.horizon;
  try {
    MetricsObserver observer(matrix, spec, metrics);
    Engine engine(matrix, spec.engine, engine_seed(spec, rep), &observer);
    const RunResult result = engine.run();
    metrics.startup_slots = result.startup_slots;
    metrics.moves = result.moves;
  } catch (const Error& e) {
    metrics.error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return metrics;
}

SmcCatalog SmcCatalog::enumerated(const RewardMatrix& matrix, Stability notion,
                                  std::uint64_t budget) {
  SmcCatalog catalog(true, notion);
  catalog.entries_ = enumerate_smcs(matrix, notion, budget);
  return catalog;
}

SmcCatalog SmcCatalog::on_the_fly(Stability notion) { return SmcCatalog(false, notion); }

std::optional<std::size_t> SmcCatalog::id_of(const RewardMatrix& matrix,
                                             std::span<const std::size_t> assignment) {
  if (enumerated_) return smc_id(entries_, assignment);
  if (!is_stable(matrix, assignment, notion_)) return std::nullopt;
  Assignment key(assignment.begin(), assignment.end());
  const auto [it, inserted] = index_.try_emplace(key, entries_.size() + 1);
  if (inserted) entries_.push_back(std::move(key));
  return it->second;
}

std::vector<std::optional<std::size_t>> smc_timeline(const RunMetrics& run,
                                                     const RewardMatrix& matrix,
                                                     SmcCatalog& catalog) {
  std::vector<std::optional<std::size_t>> ids;
  ids.reserve(run.assignments.size());
  for (const auto& a : run.assignments) ids.push_back(catalog.id_of(matrix, a));
  return ids;
}

Aggregate aggregate_runs(const std::vector<RunMetrics>& runs) {
  Aggregate agg;
  const RunMetrics* first = nullptr;
  for (const auto& r : runs) {
    if (r.error) continue;
    if (!first) first = &r;
    if (r.t != first->t) throw Error(ErrorKind::contract_violation, "runs sampled at different times");
    ++agg.repetitions;
  }
  if (!first) return agg;
  const std::size_t samples = first->t.size();
  agg.t = first->t;
  agg.phi_mean.assign(samples, 0.0);
  agg.phi_var.assign(samples, 0.0);
  const double count = static_cast<double>(agg.repetitions);
  for (std::size_t i = 0; i < samples; ++i) {
    double sum = 0.0;
    for (const auto& r : runs) {
      if (!r.error) sum += static_cast<double>(r.phi[i]);
    }
    const double mean = sum / count;
    double sq = 0.0;
    for (const auto& r : runs) {
      if (r.error) continue;
      const double d = static_cast<double>(r.phi[i]) - mean;
      sq += d * d;
    }
    agg.phi_mean[i] = mean;
    agg.phi_var[i] = sq / count;
  }
  return agg;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  result.n_users = spec.scenario.n_users;
  result.n_channels = spec.scenario.n_channels;
  result.runs.resize(spec.repetitions);

  std::vector<RewardMatrix> matrices;
  const std::size_t n_matrices = spec.fresh_matrix ? spec.repetitions : 1;
  matrices.reserve(n_matrices);
  for (std::size_t i = 0; i < n_matrices; ++i) {
    matrices.push_back(generate_scenario(repetition_scenario(spec, i)));
  }
  auto matrix_for = [&](std::size_t rep) -> const RewardMatrix& {
    return matrices[spec.fresh_matrix ? rep : 0];
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t rep = next++; rep < spec.repetitions; rep = next++) {
      result.runs[rep] = run_repetition(matrix_for(rep), spec, rep);
    }
  };
  const std::size_t n_workers = std::min(spec.workers, spec.repetitions);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // SMC ids are assigned after all runs finish, scanning repetitions in order,
  // so they do not depend on worker scheduling.
  const bool enumerable =
      count_assignments(spec.scenario.n_users, spec.scenario.n_channels) <= spec.enumeration_budget;
  auto make_catalog = [&](const RewardMatrix& m) {
    return enumerable ? SmcCatalog::enumerated(m, spec.stability_notion, spec.enumeration_budget)
                      : SmcCatalog::on_the_fly(spec.stability_notion);
  };
  if (!spec.fresh_matrix) {
    SmcCatalog catalog = make_catalog(matrices.front());
    for (auto& run : result.runs) {
      if (!run.error) run.smc_id = smc_timeline(run, matrices.front(), catalog);
    }
    result.smc_catalog = catalog.entries();
    result.catalog_enumerated = catalog.is_enumerated();
  } else {
    for (std::size_t rep = 0; rep < result.runs.size(); ++rep) {
      auto& run = result.runs[rep];
      if (run.error) continue;
      SmcCatalog catalog = make_catalog(matrices[rep]);
      run.smc_id = smc_timeline(run, matrices[rep], catalog);
    }
    result.catalog_enumerated = enumerable;
  }

  result.aggregate = aggregate_runs(result.runs);
  return result;
}

double stable_fraction(const RunMetrics& run, std::uint64_t from, std::uint64_t to) {
  if (to <= from) throw Error(ErrorKind::domain, "empty window");
  std::uint64_t stable_slots = 0;
  const auto& changes = run.stability;
  for (std::size_t i = 0; i < changes.size(); ++i) {
    if (!changes[i].stable) continue;
    // status holds on slots [begin, end)
    const std::uint64_t begin = changes[i].t;
    const std::uint64_t end = i + 1 < changes.size() ? changes[i + 1].t : run.horizon + 1;
    const std::uint64_t lo = std::max(begin, from + 1);
    const std::uint64_t hi = std::min(end, to + 1);
    if (hi > lo) stable_slots += hi - lo;
  }
  return static_cast<double>(stable_slots) / static_cast<double>(to - from);
}

std::uint64_t total_policy_changes_at(const RunMetrics& run, std::uint64_t t) {
  if (t == 0) return 0;
  const auto it = std::find(run.t.begin(), run.t.end(), t);
  if (it == run.t.end()) {
    throw Error(ErrorKind::domain, "no metrics sample at t=" + std::to_string(t));
  }
  const auto& row = run.policy_changes[static_cast<std::size_t>(it - run.t.begin())];
  std::uint64_t total = 0;
  for (auto c : row) total += c;
  return total;
}

}  // namespace csmmab
