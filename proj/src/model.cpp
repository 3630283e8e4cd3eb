#include "csmmab/model.hpp"

#include <ostream>
#include <string>

#include "csmmab/error.hpp"
#include "csmmab/format.hpp"

namespace csmmab {

RewardMatrix::RewardMatrix(std::size_t n_users, std::size_t n_channels, std::vector<double> mu)
    : n_users_(n_users), n_channels_(n_channels), mu_(std::move(mu)) {
  if (n_users == 0 || n_channels == 0) {
    throw Error(ErrorKind::invalid_scenario, "reward matrix needs at least one user and channel");
  }
  if (n_channels < n_users) {
    throw Error(ErrorKind::invalid_scenario,
                "K >= N required, got N=" + std::to_string(n_users) +
                    " K=" + std::to_string(n_channels));
  }
  if (mu_.size() != n_users * n_channels) {
    throw Error(ErrorKind::invalid_scenario, "reward matrix size does not match N x K");
  }
  for (double v : mu_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::invalid_scenario, "reward means must lie in [0, 1]");
    }
  }
}

RewardMatrix RewardMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorKind::invalid_scenario, "reward matrix has no rows");
  const std::size_t k = rows.front().size();
  std::vector<double> mu;
  mu.reserve(rows.size() * k);
  for (const auto& row : rows) {
    if (row.size() != k) throw Error(ErrorKind::invalid_scenario, "ragged reward matrix rows");
    mu.insert(mu.end(), row.begin(), row.end());
  }
  return RewardMatrix(rows.size(), k, std::move(mu));
}

ScenarioSpec two_cluster_scenario(std::uint64_t seed) {
  ScenarioSpec spec;
  spec.mode = ScenarioMode::clustered;
  spec.n_users = 10;
  spec.n_channels = 12;
  spec.cluster_assignment = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  spec.interfered_channels = {{6, 7, 8, 9, 10, 11}, {}};
  spec.seed = seed;
  return spec;
}

namespace {

void check_dimensions(const ScenarioSpec& spec) {
  if (spec.n_users == 0 || spec.n_channels == 0) {
    throw Error(ErrorKind::invalid_scenario, "scenario needs at least one user and one channel");
  }
  if (spec.n_channels < spec.n_users) {
    throw Error(ErrorKind::invalid_scenario,
                "K >= N required, got N=" + std::to_string(spec.n_users) +
                    " K=" + std::to_string(spec.n_channels));
  }
}

void check_range(const ValueRange& r, const char* name) {
  if (!(r.lo >= 0.0 && r.hi <= 1.0 && r.lo <= r.hi)) {
    throw Error(ErrorKind::invalid_scenario, std::string(name) + " range must satisfy 0<=lo<=hi<=1");
  }
}

}  // namespace

RewardMatrix gen_random_scenario(const ScenarioSpec& spec) {
  if (spec.mode != ScenarioMode::random) {
    throw Error(ErrorKind::invalid_scenario, "gen_random_scenario requires random mode");
  }
  check_dimensions(spec);
  Rng rng(spec.seed);
  std::vector<double> mu(spec.n_users * spec.n_channels);
  for (double& v : mu) v = rng.uniform();
  return RewardMatrix(spec.n_users, spec.n_channels, std::move(mu));
}

RewardMatrix gen_clustered_scenario(const ScenarioSpec& spec) {
  if (spec.mode != ScenarioMode::clustered) {
    throw Error(ErrorKind::invalid_scenario, "gen_clustered_scenario requires clustered mode");
  }
  check_dimensions(spec);
  check_range(spec.interfered_range, "interfered");
  check_range(spec.clear_range, "clear");
  check_range(spec.uninterfered_range, "uninterfered");
  if (spec.cluster_assignment.size() != spec.n_users) {
    throw Error(ErrorKind::invalid_scenario, "cluster assignment must list one cluster per user");
  }
  const std::size_t n_clusters = spec.interfered_channels.size();
  // per cluster membership mask over channels
  std::vector<std::vector<std::uint8_t>> interfered(n_clusters,
                                                    std::vector<std::uint8_t>(spec.n_channels, 0));
  for (std::size_t c = 0; c < n_clusters; ++c) {
    for (std::size_t k : spec.interfered_channels[c]) {
      if (k >= spec.n_channels) {
        throw Error(ErrorKind::invalid_scenario,
                    "interfered channel " + std::to_string(k + 1) + " outside 1.." +
                        std::to_string(spec.n_channels));
      }
      interfered[c][k] = 1;
    }
  }
  for (std::size_t c : spec.cluster_assignment) {
    if (c >= n_clusters) {
      throw Error(ErrorKind::invalid_scenario,
                  "user assigned to undefined cluster " + std::to_string(c + 1));
    }
  }

  Rng rng(spec.seed);
  std::vector<double> mu(spec.n_users * spec.n_channels);
  for (std::size_t n = 0; n < spec.n_users; ++n) {
    const std::size_t c = spec.cluster_assignment[n];
    const bool has_interference = !spec.interfered_channels[c].empty();
    for (std::size_t k = 0; k < spec.n_channels; ++k) {
      const ValueRange& r = !has_interference ? spec.uninterfered_range
                            : interfered[c][k] ? spec.interfered_range
                                               : spec.clear_range;
      mu[n * spec.n_channels + k] = rng.uniform(r.lo, r.hi);
    }
  }
  return RewardMatrix(spec.n_users, spec.n_channels, std::move(mu));
}

RewardMatrix generate_scenario(const ScenarioSpec& spec) {
  return spec.mode == ScenarioMode::random ? gen_random_scenario(spec) : gen_clustered_scenario(spec);
}

void resolve_slot_into(const RewardMatrix& matrix,
                       std::span<const std::optional<std::size_t>> transmissions, Rng& rng,
                       std::uint64_t t, SlotRecord& out) {
  const std::size_t n = matrix.users();
  const std::size_t k = matrix.channels();
  out.t = t;
  out.transmissions.assign(transmissions.begin(), transmissions.end());
  out.sensing.assign(k, 0);
  out.collided.assign(n, 0);
  out.rewards.assign(n, 0);
  // sensing doubles as the occupancy count until it is clamped to {0, 1}
  for (const auto& tx : transmissions) {
    if (tx) out.sensing[*tx] = static_cast<std::uint8_t>(out.sensing[*tx] < 2 ? out.sensing[*tx] + 1 : 2);
  }
  for (std::size_t u = 0; u < n; ++u) {
    const auto& tx = transmissions[u];
    if (!tx) continue;
    if (out.sensing[*tx] > 1) {
      out.collided[u] = 1;
    } else {
      out.rewards[u] = rng.bernoulli(matrix(u, *tx)) ? 1 : 0;
    }
  }
  for (auto& s : out.sensing) s = s > 0 ? 1 : 0;
}

SlotRecord resolve_slot(const RewardMatrix& matrix,
                        std::span<const std::optional<std::size_t>> transmissions, Rng& rng,
                        std::uint64_t t) {
  if (transmissions.size() != matrix.users()) {
    throw Error(ErrorKind::contract_violation, "one transmission entry per user required");
  }
  for (const auto& tx : transmissions) {
    if (tx && *tx >= matrix.channels()) {
      throw Error(ErrorKind::contract_violation, "transmission on a channel outside 1..K");
    }
  }
  SlotRecord rec;
  resolve_slot_into(matrix, transmissions, rng, t, rec);
  return rec;
}

}  // namespace csmmab

namespace csmmab {

void write_matrix_csv(const RewardMatrix& matrix, std::ostream& os) {
  os << "user";
  for (std::size_t k = 0; k < matrix.channels(); ++k) os << ",ch_" << k + 1;
  os << '\n';
  for (std::size_t n = 0; n < matrix.users(); ++n) {
    os << n + 1;
    for (double v : matrix.row(n)) os << ',' << format_double(v);
    os << '\n';
  }
}

}  // namespace csmmab
