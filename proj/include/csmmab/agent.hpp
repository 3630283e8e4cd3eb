#pragma once

// A single user's learning state and decision rules.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "csmmab/rng.hpp"

namespace csmmab {

inline constexpr double kUnsampledIndex = std::numeric_limits<double>::infinity();

struct ArmStats {
  double mu_hat = 0.0;  // meaningless while samples == 0
  std::uint64_t samples = 0;

  friend bool operator==(const ArmStats&, const ArmStats&) = default;
};

/// UCB1 index at global slot t >= 1; kUnsampledIndex for an unsampled arm.
double ucb_index(const ArmStats& stats, std::uint64_t t);

/// Running-mean update with one binary reward.
ArmStats update_stats(ArmStats stats, int reward);

enum class Role { idle, candidate, initiator, responder };

class AgentState {
 public:
  AgentState(std::size_t user_id, std::size_t n_channels, std::size_t current_channel);

  /// Switch to oracle statistics: decisions use these true means with no
  /// exploration bonus.
  void use_oracle_means(std::span<const double> true_means);
  bool oracle() const noexcept { return !oracle_means_.empty(); }

  std::size_t user_id() const noexcept { return user_id_; }
  std::size_t channels() const noexcept { return mu_hat_.size(); }

  std::size_t current_channel() const noexcept { return current_channel_; }
  void move_to(std::size_t channel);

  ArmStats stats(std::size_t channel) const noexcept {
    return {mu_hat_[channel], static_cast<std::uint64_t>(samples_[channel])};
  }
  void record(std::size_t channel, int reward);

  /// Decision values for every channel at slot t: UCB indices, or the true
  /// means in oracle mode. Writes into `out` (size K).
  void decision_indices(std::uint64_t t, std::span<double> out) const;

  Role role = Role::idle;
  bool flag = false;
  std::vector<std::size_t> pref_list;
  std::size_t pref_cursor = 0;  // 1-based position in pref_list; 0 = done

 private:
  std::size_t user_id_;
  std::size_t current_channel_;
  // structure-of-arrays so the index kernel can stream over channels
  std::vector<double> mu_hat_;
  std::vector<double> samples_;
  std::vector<double> oracle_means_;
};

/// Channels strictly preferred over the current one, best first; ties by
/// ascending channel. Empty means the user is satisfied.
std::vector<std::size_t> rank_channels(const AgentState& state, std::uint64_t t);

/// The ranking rule applied to explicit decision values.
std::vector<std::size_t> rank_by_indices(std::span<const double> indices, std::size_t current);

/// Bernoulli(epsilon) initiator flag. Only dissatisfied users may draw.
bool draw_flag(const AgentState& state, double epsilon, Rng& rng);

/// Accept iff the initiator's channel is strictly better than the current one.
bool respond_to_proposal(const AgentState& state, std::size_t initiator_channel, std::uint64_t t);

}  // namespace csmmab
