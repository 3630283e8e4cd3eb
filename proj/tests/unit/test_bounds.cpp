#include <doctest.h>

#include <cmath>

#include "csmmab/bounds.hpp"
#include "csmmab/error.hpp"

using namespace csmmab;
using namespace csmmab::bounds;

// Reference values evaluated at 30 significant digits.
TEST_CASE("worked values") {
  CHECK(t_min_bound(1, 1.0) == doctest::Approx(1.15571122977523981).epsilon(1e-14));
  CHECK(t_min_bound(12, 0.1) == doctest::Approx(1.00010418294581727).epsilon(1e-14));
  CHECK(t_condition_threshold(12, 0.1) == doctest::Approx(19200.0).epsilon(1e-14));
  CHECK(s_min(1000.0, 0.1) == doctest::Approx(5526.20422318570964).epsilon(1e-14));
  CHECK(single_initiator_prob(1.0 / 12, 10) == doctest::Approx(0.0380821716258720826).epsilon(1e-14));
  CHECK(t_prime(0.26, 1.0 / 12, 10, 12, 2.0) == doctest::Approx(2846.63303858838980).epsilon(1e-13));
  CHECK(signalling_ratio(12, 10) == doctest::Approx(6.0 / 11.0).epsilon(1e-15));
  CHECK(signalling_ratio(3, 3) == 6.0);
  CHECK(signalling_ratio_exact(12, 10) == Fraction{6, 11});
  CHECK(signalling_ratio_exact(3, 3) == Fraction{6, 1});
}

TEST_CASE("t_prime limits and monotonicity") {
  const double tm = 3.0;
  const double off = 4.0 / std::pow(tm, 4.0);
  CHECK(t_prime(off + 0.999999, 0.1, 5, 6, tm) < 1e-3);
  CHECK(t_prime(off + 0.1, 0.1, 5, 6, tm) > t_prime(off + 0.2, 0.1, 5, 6, tm));
  CHECK_THROWS_AS(t_prime(off, 0.1, 5, 6, tm), Error);
  CHECK_THROWS_AS(t_prime(off + 1.0, 0.1, 5, 6, tm), Error);
}

TEST_CASE("p_smc and convergence time") {
  CHECK(p_smc(0.3, 2.0, 1, 1) == 1.0);  // empty product
  CHECK(p_smc(1e-9, 1e4, 10, 12) == doctest::Approx(1.0).epsilon(1e-6));
  const double tm = 10.0;
  const double p = p_smc(0.1, tm, 10, 12);
  CHECK(p == doctest::Approx(std::pow(0.9 * (1 - 2e-4), 110)).epsilon(1e-13));
  const double T = convergence_time(0.05, tm, 1000.0, p);
  CHECK(std::isfinite(T));
  CHECK(T > tm);
  CHECK_THROWS_AS(p_smc(0.1, 1.0, 2, 2), Error);  // 1 - 2 t^-4 < 0
  CHECK_THROWS_AS(convergence_time(0.05, tm, 1000.0, 1.0), Error);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(s_min(1.0, 0.1), Error);
  CHECK_THROWS_AS(s_min(10.0, 0.0), Error);
  CHECK_THROWS_AS(t_min_bound_from_m(4.0), Error);  // (M-1)^2 < 4M
  CHECK_THROWS_AS(signalling_ratio(12, 2), Error);
  CHECK_THROWS_AS(signalling_ratio(1, 3), Error);
  CHECK_THROWS_AS(single_initiator_prob(0.0, 3), Error);
  try {
    s_min(0.5, 0.1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
}

TEST_CASE("double root of the time condition") {
  // M = 3 + 2 sqrt 2 makes (M-1)^2 = 4M
  const double m = 3.0 + 2.0 * std::sqrt(2.0);
  CHECK(t_min_bound_from_m(m) == doctest::Approx((m - 1) / 2).epsilon(1e-7));
}

TEST_CASE("gap summary") {
  const auto g = gap_summary(RewardMatrix::from_rows({{0.1, 0.5, 0.45}, {0.2, 0.9, 0.2}}));
  CHECK(g.delta_n[0] == doctest::Approx(0.05));
  CHECK(g.delta_n[1] == doctest::Approx(0.7));
  CHECK(g.delta_min == doctest::Approx(0.05));
  CHECK_THROWS_AS(gap_summary(RewardMatrix::from_rows({{0.3, 0.3}})), Error);
}
