#include "csmmab/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "csmmab/error.hpp"
#include "csmmab/kernels.hpp"

namespace csmmab {

double ucb_index(const ArmStats& stats, std::uint64_t t) {
  if (t < 1) throw Error(ErrorKind::domain, "ucb_index needs t >= 1");
  if (stats.samples == 0) return kUnsampledIndex;
  const double samples = static_cast<double>(stats.samples);
  return stats.mu_hat + std::sqrt(2.0 * std::log(static_cast<double>(t)) / samples);
}

ArmStats update_stats(ArmStats stats, int reward) {
  if (reward != 0 && reward != 1) throw Error(ErrorKind::domain, "rewards are binary");
  const double s = static_cast<double>(stats.samples);
  const double prior = stats.samples == 0 ? 0.0 : stats.mu_hat * s;
  return {(prior + reward) / (s + 1.0), stats.samples + 1};
}

AgentState::AgentState(std::size_t user_id, std::size_t n_channels, std::size_t current_channel)
    : user_id_(user_id),
      current_channel_(current_channel),
      mu_hat_(n_channels, 0.0),
      samples_(n_channels, 0.0) {
  if (current_channel >= n_channels) {
    throw Error(ErrorKind::contract_violation, "agent channel outside 1..K");
  }
}

void AgentState::use_oracle_means(std::span<const double> true_means) {
  if (true_means.size() != channels()) {
    throw Error(ErrorKind::contract_violation, "oracle means must have one entry per channel");
  }
  oracle_means_.assign(true_means.begin(), true_means.end());
}

void AgentState::move_to(std::size_t channel) {
  if (channel >= channels()) throw Error(ErrorKind::contract_violation, "channel outside 1..K");
  current_channel_ = channel;
}

void AgentState::record(std::size_t channel, int reward) {
  const ArmStats next = update_stats(stats(channel), reward);
  mu_hat_[channel] = next.mu_hat;
  samples_[channel] = static_cast<double>(next.samples);
}

void AgentState::decision_indices(std::uint64_t t, std::span<double> out) const {
  if (t < 1) throw Error(ErrorKind::domain, "decision indices need t >= 1");
  if (oracle()) {
    std::copy(oracle_means_.begin(), oracle_means_.end(), out.begin());
    return;
  }
  kernels::ucb_indices(mu_hat_, samples_, std::log(static_cast<double>(t)), out);
}

std::vector<std::size_t> rank_by_indices(std::span<const double> indices, std::size_t current) {
  const double own = indices[current];
  std::vector<std::size_t> better;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (k != current && indices[k] > own) better.push_back(k);
  }
  std::stable_sort(better.begin(), better.end(),
                   [&](std::size_t a, std::size_t b) { return indices[a] > indices[b]; });
  return better;
}

std::vector<std::size_t> rank_channels(const AgentState& state, std::uint64_t t) {
  std::vector<double> indices(state.channels());
  state.decision_indices(t, indices);
  return rank_by_indices(indices, state.current_channel());
}

bool draw_flag(const AgentState& state, double epsilon, Rng& rng) {
  if (state.pref_list.empty()) {
    throw Error(ErrorKind::contract_violation,
                "user " + std::to_string(state.user_id() + 1) +
                    " is satisfied and may not raise an initiator flag");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorKind::domain, "initiator probability must lie in (0, 1]");
  }
  return rng.bernoulli(epsilon);
}

bool respond_to_proposal(const AgentState& state, std::size_t initiator_channel, std::uint64_t t) {
  if (initiator_channel >= state.channels()) {
    throw Error(ErrorKind::contract_violation, "initiator channel outside 1..K");
  }
  if (state.oracle()) {
    std::vector<double> indices(state.channels());
    state.decision_indices(t, indices);
    return indices[initiator_channel] > indices[state.current_channel()];
  }
  return ucb_index(state.stats(initiator_channel), t) > ucb_index(state.stats(state.current_channel()), t);
}

}  // namespace csmmab
