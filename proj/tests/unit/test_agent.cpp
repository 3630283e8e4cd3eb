#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "csmmab/agent.hpp"
#include "csmmab/error.hpp"
#include "csmmab/kernels.hpp"
#include "csmmab/rng.hpp"

using namespace csmmab;

// Reference values evaluated at 30 significant digits.
TEST_CASE("ucb index values") {
  CHECK(ucb_index({0.5, 4}, 1) == 0.5);
  // t = e^2 is not a slot index; the index kernel takes ln t directly
  std::vector<double> out(1);
  kernels::ucb_indices(std::vector<double>{0.0}, std::vector<double>{2.0}, 2.0, out);
  CHECK(out[0] == doctest::Approx(1.41421356237309505).epsilon(1e-15));
  CHECK(ucb_index({0.3, 8}, 1000) == doctest::Approx(1.61413044243923299).epsilon(1e-14));
  CHECK(std::isinf(ucb_index({0.0, 0}, 5)));
  CHECK(ucb_index({0.0, 0}, 5) == kUnsampledIndex);
  CHECK_THROWS_AS(ucb_index({0.5, 1}, 0), Error);
}

TEST_CASE("update_stats is a running mean") {
  const auto a = update_stats({0.5, 2}, 1);
  CHECK(a.samples == 3);
  CHECK(a.mu_hat == doctest::Approx(2.0 / 3.0));
  const auto b = update_stats({0.0, 0}, 0);
  CHECK(b.samples == 1);
  CHECK(b.mu_hat == 0.0);
  CHECK_THROWS_AS(update_stats({0.0, 0}, 2), Error);

  Rng rng(3);
  ArmStats s{};
  int sum = 0;
  for (int i = 1; i <= 5000; ++i) {
    const int r = rng.bernoulli(0.37);
    sum += r;
    s = update_stats(s, r);
    REQUIRE(s.mu_hat == doctest::Approx(double(sum) / i).epsilon(1e-12));
  }
}

TEST_CASE("rank_by_indices ordering rules") {
  CHECK(rank_by_indices(std::vector<double>{0.9, 0.7, 0.8}, 2) == std::vector<std::size_t>{0});
  CHECK(rank_by_indices(std::vector<double>{0.1, 0.2, 0.8}, 2).empty());
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(rank_by_indices(std::vector<double>{0.95, inf, 0.9, 0.5}, 3) ==
        std::vector<std::size_t>{1, 0, 2});
  // equal indices keep ascending channel order; equal-to-current is excluded
  CHECK(rank_by_indices(std::vector<double>{0.6, 0.7, 0.7, 0.6}, 0) ==
        std::vector<std::size_t>{1, 2});
}

TEST_CASE("rank_channels on learned statistics") {
  AgentState a(0, 3, 2);
  for (int i = 0; i < 10; ++i) a.record(2, 1);
  CHECK(rank_channels(a, 100) == std::vector<std::size_t>{0, 1});  // unsampled channels first
  for (int i = 0; i < 10; ++i) {
    a.record(0, 0);
    a.record(1, 0);
  }
  CHECK(rank_channels(a, 1).empty());
  CHECK(a.stats(2).samples == 10);
  CHECK(a.stats(2).mu_hat == 1.0);
}

TEST_CASE("oracle decisions use the true means") {
  AgentState a(0, 3, 1);
  const std::vector<double> mu = {0.2, 0.5, 0.9};
  a.use_oracle_means(mu);
  CHECK(a.oracle());
  CHECK(rank_channels(a, 10) == std::vector<std::size_t>{2});
  std::vector<double> out(3);
  a.decision_indices(10, out);
  CHECK(out == mu);
  CHECK(respond_to_proposal(a, 2, 10));
  CHECK_FALSE(respond_to_proposal(a, 0, 10));
  CHECK_FALSE(respond_to_proposal(a, 1, 10));  // equal: decline
}

TEST_CASE("respond_to_proposal on learned indices") {
  AgentState a(0, 2, 0);
  a.record(0, 1);
  CHECK(respond_to_proposal(a, 1, 10));  // unsampled initiator channel dominates
  a.record(1, 1);
  CHECK_FALSE(respond_to_proposal(a, 1, 10));  // identical stats: equal indices
  AgentState b(0, 2, 0);
  b.use_oracle_means(std::vector<double>{0.6, 0.9});
  CHECK(respond_to_proposal(b, 1, 1));
}

TEST_CASE("draw_flag contract and rate") {
  AgentState a(0, 12, 0);
  Rng rng(11);
  CHECK_THROWS_AS(draw_flag(a, 0.5, rng), Error);
  a.pref_list = {3};
  CHECK_THROWS_AS(draw_flag(a, 0.0, rng), Error);
  CHECK_THROWS_AS(draw_flag(a, 1.5, rng), Error);
  for (int i = 0; i < 100; ++i) CHECK(draw_flag(a, 1.0, rng));
  const int n = 10000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += draw_flag(a, 1.0 / 12, rng);
  const double p = 1.0 / 12;
  CHECK(std::abs(hits / double(n) - p) <= 3 * std::sqrt(p * (1 - p) / n));
}
