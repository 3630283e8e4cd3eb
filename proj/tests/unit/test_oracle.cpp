#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "csmmab/agent.hpp"
#include "csmmab/error.hpp"
#include "csmmab/oracle.hpp"
#include "csmmab/rng.hpp"

using namespace csmmab;

namespace {

RewardMatrix random_matrix(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<double> mu(n * k);
  for (auto& v : mu) v = rng.uniform();
  return RewardMatrix(n, k, mu);
}

// All orthogonal assignments by brute force over K^N tuples.
std::vector<Assignment> all_assignments(std::size_t n, std::size_t k) {
  std::vector<Assignment> out;
  Assignment a(n, 0);
  for (;;) {
    std::vector<int> used(k, 0);
    bool ok = true;
    for (auto c : a) ok = ok && !used[c]++;
    if (ok) out.push_back(a);
    std::size_t i = n;
    while (i > 0 && ++a[i - 1] == k) a[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

// Ordered-pair definition written out directly.
bool pairwise_reference(const RewardMatrix& m, const Assignment& a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (i == j) continue;
      if (m(i, a[i]) < m(i, a[j]) && m(j, a[j]) <= m(j, a[i])) return false;
    }
  }
  return true;
}

const RewardMatrix kTable = RewardMatrix::from_rows({
    {0.9, 0.7, 0.3, 0.5},
    {0.7, 0.9, 0.5, 0.3},
    {0.7, 0.5, 0.3, 0.9},
});
const Assignment kTableConfig = {2, 0, 3};

}  // namespace

TEST_CASE("ranking table example") {
  CHECK(user_potential(kTable, kTableConfig, 0) == 3);
  CHECK(user_potential(kTable, kTableConfig, 1) == 1);
  CHECK(user_potential(kTable, kTableConfig, 2) == 0);
  CHECK(system_potential(kTable, kTableConfig) == 4);
  CHECK(is_smc_pairwise(kTable, kTableConfig));
  CHECK_FALSE(is_absorbing(kTable, kTableConfig));  // user 2 envies the free channel 2
}

TEST_CASE("identical rows: both assignments are pairwise stable") {
  const auto m = RewardMatrix::from_rows({{0.9, 0.1}, {0.9, 0.1}});
  CHECK(is_smc_pairwise(m, Assignment{0, 1}));
  CHECK(is_smc_pairwise(m, Assignment{1, 0}));
  CHECK(enumerate_smcs(m, Stability::pairwise) == std::vector<Assignment>{{0, 1}, {1, 0}});
  CHECK(enumerate_smcs(m, Stability::absorbing) == std::vector<Assignment>{{0, 1}, {1, 0}});
}

TEST_CASE("small cases") {
  const auto one = RewardMatrix::from_rows({{0.4}});
  CHECK(enumerate_smcs(one, Stability::absorbing) == std::vector<Assignment>{{0}});
  const auto two = RewardMatrix::from_rows({{0.2, 0.8}});
  CHECK(is_smc_pairwise(two, Assignment{0}));
  CHECK_FALSE(is_absorbing(two, Assignment{0}));
  CHECK(is_absorbing(two, Assignment{1}));
  CHECK(greedy_smc(two, std::vector<std::size_t>{0}) == Assignment{1});
}

TEST_CASE("greedy and optimal reward examples") {
  const auto m = RewardMatrix::from_rows({{0.9, 0.1}, {0.8, 0.2}});
  CHECK(greedy_smc(m, std::vector<std::size_t>{0, 1}) == Assignment{0, 1});
  CHECK(optimal_reward(m) == doctest::Approx(1.1));
  CHECK(optimal_assignment(m).assignment == Assignment{0, 1});
  CHECK_THROWS_AS(greedy_smc(m, std::vector<std::size_t>{0, 0}), Error);
}

TEST_CASE("enumeration budget") {
  const auto m = RewardMatrix(4, 6, std::vector<double>(24, 0.5));
  CHECK(count_assignments(4, 6) == 360);
  try {
    enumerate_smcs(m, Stability::pairwise, 100);
    FAIL("expected budget error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::budget_exceeded);
  }
  CHECK(enumerate_smcs(m, Stability::pairwise, 360).size() == 360);
  CHECK(count_assignments(30, 60) == UINT64_MAX);
}

TEST_CASE("checkers agree with brute force on random instances") {
  Rng rng(8);
  for (int i = 0; i < 60; ++i) {
    const std::size_t k = 1 + rng.index(5);
    const std::size_t n = 1 + rng.index(std::min<std::size_t>(k, 4));
    const auto m = random_matrix(rng, n, k);
    const auto all = all_assignments(n, k);
    std::vector<Assignment> pair, absorb;
    for (const auto& a : all) {
      REQUIRE(system_potential(m, a) <= n * (k - 1));
      const bool p = pairwise_reference(m, a);
      REQUIRE(is_smc_pairwise(m, a) == p);
      bool free_envy = false;
      for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t c = 0; c < k; ++c) {
          if (std::find(a.begin(), a.end(), c) == a.end() && m(u, c) > m(u, a[u])) free_envy = true;
        }
      }
      REQUIRE(is_absorbing(m, a) == (p && !free_envy));
      if (n == k) REQUIRE(is_absorbing(m, a) == p);
      if (system_potential(m, a) == 0) REQUIRE(is_absorbing(m, a));
      if (p) pair.push_back(a);
      if (p && !free_envy) absorb.push_back(a);
    }
    CHECK(enumerate_smcs(m, Stability::pairwise) == pair);
    CHECK(enumerate_smcs(m, Stability::absorbing) == absorb);
    CHECK_FALSE(pair.empty());
    for (std::size_t id = 0; id < absorb.size(); ++id) CHECK(smc_id(absorb, absorb[id]) == id + 1);
  }
}

TEST_CASE("greedy output is absorbing for distinct rows") {
  Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    const std::size_t k = 1 + rng.index(6);
    const std::size_t n = 1 + rng.index(k);
    const auto m = random_matrix(rng, n, k);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    CHECK(is_absorbing(m, greedy_smc(m, order)));
  }
}

TEST_CASE("zero potential implies absorbing but not conversely") {
  Rng rng(5);
  bool witness = false;
  for (int i = 0; i < 200 && !witness; ++i) {
    const auto m = random_matrix(rng, 3, 3);
    for (const auto& a : enumerate_smcs(m, Stability::absorbing)) {
      if (system_potential(m, a) > 0) witness = true;
    }
  }
  CHECK(witness);
}

TEST_CASE("potential equals the oracle ranking length") {
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const auto m = random_matrix(rng, 3, 5);
    const std::size_t first = rng.index(5);
    const Assignment full = {first, (first + 1) % 5, (first + 3) % 5};
    for (std::size_t u = 0; u < 3; ++u) {
      AgentState s(u, 5, full[u]);
      s.use_oracle_means(m.row(u));
      CHECK(rank_channels(s, 1).size() == user_potential(m, full, u));
    }
  }
}

TEST_CASE("optimal reward dominates every stable configuration") {
  Rng rng(77);
  for (int i = 0; i < 40; ++i) {
    const std::size_t k = 1 + rng.index(5);
    const std::size_t n = 1 + rng.index(k);
    const auto m = random_matrix(rng, n, k);
    const double best = optimal_reward(m);
    double brute = 0.0;
    for (const auto& a : all_assignments(n, k)) brute = std::max(brute, assignment_reward(m, a));
    CHECK(best == doctest::Approx(brute).epsilon(1e-15));
    for (const auto& a : enumerate_smcs(m, Stability::pairwise)) CHECK(best >= assignment_reward(m, a));
  }
}
