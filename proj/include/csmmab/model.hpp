#pragma once

// Ground-truth scenarios and the shared medium: who transmitted where, who
// collided, what was sensed and what each sole occupant earned.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "csmmab/rng.hpp"

namespace csmmab {

/// N x K matrix of Bernoulli means mu(n, k). Requires K >= N and entries in [0, 1].
class RewardMatrix {
 public:
  RewardMatrix(std::size_t n_users, std::size_t n_channels, std::vector<double> mu);

  /// Build from rows; every row must have the same length.
  static RewardMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t users() const noexcept { return n_users_; }
  std::size_t channels() const noexcept { return n_channels_; }

  double operator()(std::size_t user, std::size_t channel) const noexcept {
    return mu_[user * n_channels_ + channel];
  }

  std::span<const double> row(std::size_t user) const noexcept {
    return {mu_.data() + user * n_channels_, n_channels_};
  }

  std::span<const double> values() const noexcept { return mu_; }

  friend bool operator==(const RewardMatrix&, const RewardMatrix&) = default;

 private:
  std::size_t n_users_;
  std::size_t n_channels_;
  std::vector<double> mu_;
};

enum class ScenarioMode { random, clustered };

struct ValueRange {
  double lo;
  double hi;

  friend bool operator==(const ValueRange&, const ValueRange&) = default;
};

/// Everything needed to regenerate a RewardMatrix. Users and channels are
/// 0-based here; the config file layer converts from 1-based ids.
struct ScenarioSpec {
  ScenarioMode mode = ScenarioMode::random;
  std::size_t n_users = 1;
  std::size_t n_channels = 1;
  // clustered mode: cluster id per user, and the interfered channel set of each cluster
  std::vector<std::size_t> cluster_assignment;
  std::vector<std::vector<std::size_t>> interfered_channels;
  ValueRange interfered_range{0.0, 0.25};
  ValueRange clear_range{0.5, 1.0};
  ValueRange uninterfered_range{0.0, 1.0};
  std::uint64_t seed = 0;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Users 1-5 interfered on channels 7-12, users 6-10 uninterfered, K = 12.
ScenarioSpec two_cluster_scenario(std::uint64_t seed);

RewardMatrix gen_random_scenario(const ScenarioSpec& spec);
RewardMatrix gen_clustered_scenario(const ScenarioSpec& spec);

/// Dispatch on spec.mode.
RewardMatrix generate_scenario(const ScenarioSpec& spec);

/// One slot on the medium.
struct SlotRecord {
  std::uint64_t t = 0;
  std::vector<std::optional<std::size_t>> transmissions;  // per user
  std::vector<std::uint8_t> sensing;                      // per channel, 1 = busy
  std::vector<std::uint8_t> collided;                     // per user
  std::vector<std::uint8_t> rewards;                      // per user, {0, 1}
};

/// Resolve one slot. Sole transmitters draw Bernoulli(mu) in user order;
/// colliding and silent users earn 0.
SlotRecord resolve_slot(const RewardMatrix& matrix,
                        std::span<const std::optional<std::size_t>> transmissions, Rng& rng,
                        std::uint64_t t = 0);

/// Allocation-free variant for the engine's hot loop; `out` is reused.
void resolve_slot_into(const RewardMatrix& matrix,
                       std::span<const std::optional<std::size_t>> transmissions, Rng& rng,
                       std::uint64_t t, SlotRecord& out);

/// Header row "user,ch_1,...,ch_K", then one row per user.
void write_matrix_csv(const RewardMatrix& matrix, std::ostream& os);

}  // namespace csmmab
