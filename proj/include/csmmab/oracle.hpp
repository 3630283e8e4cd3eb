#pragma once

// Ground-truth stability analysis on the true reward matrix.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "csmmab/model.hpp"

namespace csmmab {

/// Channel per user (0-based). Must be injective.
using Assignment = std::vector<std::size_t>;

enum class Stability { pairwise, absorbing };

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

bool is_orthogonal(std::span<const std::size_t> assignment, std::size_t n_channels);

/// Number of channels user n strictly prefers to her current one.
std::size_t user_potential(const RewardMatrix& matrix, std::span<const std::size_t> assignment,
                           std::size_t user);

std::size_t system_potential(const RewardMatrix& matrix, std::span<const std::size_t> assignment);

/// No ordered pair (n, m) with mu_n(a_n) < mu_n(a_m) and mu_m(a_m) <= mu_m(a_n).
bool is_smc_pairwise(const RewardMatrix& matrix, std::span<const std::size_t> assignment);

/// Pairwise stable and nobody strictly prefers a free channel.
bool is_absorbing(const RewardMatrix& matrix, std::span<const std::size_t> assignment);

bool is_stable(const RewardMatrix& matrix, std::span<const std::size_t> assignment,
               Stability notion);

/// K! / (K - N)!, saturating at UINT64_MAX.
std::uint64_t count_assignments(std::size_t n_users, std::size_t n_channels);

/// All orthogonal assignments passing `notion`, in lexicographic order.
std::vector<Assignment> enumerate_smcs(const RewardMatrix& matrix, Stability notion,
                                       std::uint64_t budget = kDefaultEnumerationBudget);

/// 1-based position of `assignment` in a sorted catalog, if present.
std::optional<std::size_t> smc_id(std::span<const Assignment> catalog,
                                  std::span<const std::size_t> assignment);

/// Users in `order` each take their best remaining channel (lowest id on ties).
Assignment greedy_smc(const RewardMatrix& matrix, std::span<const std::size_t> order);

/// sum over users of mu(n, a_n).
double assignment_reward(const RewardMatrix& matrix, std::span<const std::size_t> assignment);

struct OptimalAssignment {
  Assignment assignment;
  double reward = 0.0;
};

/// Exhaustive maximum of the summed means over orthogonal assignments.
OptimalAssignment optimal_assignment(const RewardMatrix& matrix,
                                     std::uint64_t budget = kDefaultEnumerationBudget);

double optimal_reward(const RewardMatrix& matrix, std::uint64_t budget = kDefaultEnumerationBudget);

}  // namespace csmmab
