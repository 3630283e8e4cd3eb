#include "csmmab/oracle.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "csmmab/error.hpp"
#include "csmmab/kernels.hpp"

namespace csmmab {

bool is_orthogonal(std::span<const std::size_t> assignment, std::size_t n_channels) {
  std::vector<std::uint8_t> used(n_channels, 0);
  for (std::size_t c : assignment) {
    if (c >= n_channels || used[c]) return false;
    used[c] = 1;
  }
  return true;
}

namespace {

void require_valid(const RewardMatrix& matrix, std::span<const std::size_t> assignment) {
  if (assignment.size() != matrix.users()) {
    throw Error(ErrorKind::contract_violation, "assignment must give one channel per user");
  }
  if (!is_orthogonal(assignment, matrix.channels())) {
    throw Error(ErrorKind::contract_violation, "assignment is not orthogonal");
  }
}

std::uint64_t require_budget(const RewardMatrix& matrix, std::uint64_t budget) {
  const std::uint64_t count = count_assignments(matrix.users(), matrix.channels());
  if (count > budget) {
    throw Error(ErrorKind::budget_exceeded,
                "enumeration of " + (count == std::numeric_limits<std::uint64_t>::max()
                                         ? std::string("more than 2^64")
                                         : std::to_string(count)) +
                    " assignments exceeds budget " + std::to_string(budget));
  }
  return count;
}

// Depth-first over channels in ascending order, so assignments come out
// lexicographically sorted.
template <typename Visit>
void for_each_assignment(std::size_t n_users, std::size_t n_channels, Visit&& visit) {
  Assignment current(n_users);
  std::vector<std::uint8_t> used(n_channels, 0);
  auto recurse = [&](auto&& self, std::size_t user) -> void {
    if (user == n_users) {
      visit(static_cast<const Assignment&>(current));
      return;
    }
    for (std::size_t k = 0; k < n_channels; ++k) {
      if (used[k]) continue;
      used[k] = 1;
      current[user] = k;
      self(self, user + 1);
      used[k] = 0;
    }
  };
  recurse(recurse, 0);
}

}  // namespace

std::size_t user_potential(const RewardMatrix& matrix, std::span<const std::size_t> assignment,
                           std::size_t user) {
  require_valid(matrix, assignment);
  return kernels::count_greater(matrix.row(user), matrix(user, assignment[user]));
}

std::size_t system_potential(const RewardMatrix& matrix, std::span<const std::size_t> assignment) {
  require_valid(matrix, assignment);
  std::size_t total = 0;
  for (std::size_t n = 0; n < matrix.users(); ++n) {
    total += kernels::count_greater(matrix.row(n), matrix(n, assignment[n]));
  }
  return total;
}

bool is_smc_pairwise(const RewardMatrix& matrix, std::span<const std::size_t> assignment) {
  require_valid(matrix, assignment);
  const std::size_t n_users = matrix.users();
  for (std::size_t n = 0; n < n_users; ++n) {
    for (std::size_t m = 0; m < n_users; ++m) {
      if (n == m) continue;
      const std::size_t an = assignment[n];
      const std::size_t am = assignment[m];
      const bool wants = matrix(n, an) < matrix(n, am);
      const bool willing = matrix(m, am) <= matrix(m, an);
      if (wants && willing) return false;
    }
  }
  return true;
}

bool is_absorbing(const RewardMatrix& matrix, std::span<const std::size_t> assignment) {
  if (!is_smc_pairwise(matrix, assignment)) return false;
  std::vector<std::uint8_t> used(matrix.channels(), 0);
  for (std::size_t c : assignment) used[c] = 1;
  for (std::size_t n = 0; n < matrix.users(); ++n) {
    const double own = matrix(n, assignment[n]);
    for (std::size_t k = 0; k < matrix.channels(); ++k) {
      if (!used[k] && matrix(n, k) > own) return false;
    }
  }
  return true;
}

bool is_stable(const RewardMatrix& matrix, std::span<const std::size_t> assignment,
               Stability notion) {
  return notion == Stability::pairwise ? is_smc_pairwise(matrix, assignment)
                                       : is_absorbing(matrix, assignment);
}

std::uint64_t count_assignments(std::size_t n_users, std::size_t n_channels) {
  if (n_users > n_channels) return 0;
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < n_users; ++i) {
    const std::uint64_t factor = n_channels - i;
    if (count > std::numeric_limits<std::uint64_t>::max() / factor) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    count *= factor;
  }
  return count;
}

std::vector<Assignment> enumerate_smcs(const RewardMatrix& matrix, Stability notion,
                                       std::uint64_t budget) {
  require_budget(matrix, budget);
  std::vector<Assignment> out;
  for_each_assignment(matrix.users(), matrix.channels(), [&](const Assignment& a) {
    if (is_stable(matrix, a, notion)) out.push_back(a);
  });
  return out;
}

std::optional<std::size_t> smc_id(std::span<const Assignment> catalog,
                                  std::span<const std::size_t> assignment) {
  const auto it = std::lower_bound(
      catalog.begin(), catalog.end(), assignment, [](const Assignment& a, auto b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
      });
  if (it == catalog.end() || !std::equal(it->begin(), it->end(), assignment.begin(), assignment.end())) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - catalog.begin()) + 1;
}

Assignment greedy_smc(const RewardMatrix& matrix, std::span<const std::size_t> order) {
  const std::size_t n_users = matrix.users();
  std::vector<std::uint8_t> seen(n_users, 0);
  if (order.size() != n_users) {
    throw Error(ErrorKind::contract_violation, "order must be a permutation of the users");
  }
  for (std::size_t u : order) {
    if (u >= n_users || seen[u]) {
      throw Error(ErrorKind::contract_violation, "order must be a permutation of the users");
    }
    seen[u] = 1;
  }
  Assignment out(n_users);
  std::vector<std::uint8_t> taken(matrix.channels(), 0);
  for (std::size_t u : order) {
    std::size_t best = matrix.channels();
    for (std::size_t k = 0; k < matrix.channels(); ++k) {
      if (taken[k]) continue;
      if (best == matrix.channels() || matrix(u, k) > matrix(u, best)) best = k;
    }
    out[u] = best;
    taken[best] = 1;
  }
  return out;
}

double assignment_reward(const RewardMatrix& matrix, std::span<const std::size_t> assignment) {
  require_valid(matrix, assignment);
  double total = 0.0;
  for (std::size_t n = 0; n < matrix.users(); ++n) total += matrix(n, assignment[n]);
  return total;
}

OptimalAssignment optimal_assignment(const RewardMatrix& matrix, std::uint64_t budget) {
  require_budget(matrix, budget);
  OptimalAssignment best;
  best.reward = -1.0;
  for_each_assignment(matrix.users(), matrix.channels(), [&](const Assignment& a) {
    double total = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) total += matrix(n, a[n]);
    if (total > best.reward) {
      best.reward = total;
      best.assignment = a;
    }
  });
  return best;
}

double optimal_reward(const RewardMatrix& matrix, std::uint64_t budget) {
  return optimal_assignment(matrix, budget).reward;
}

}  // namespace csmmab
