#include "csmmab/bounds.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "csmmab/error.hpp"
#include "csmmab/format.hpp"

namespace csmmab::bounds {
namespace {

[[noreturn]] void domain(const std::string& what, double value) {
  throw Error(ErrorKind::domain, what + " (got " + format_double(value) + ")");
}

void require_probability_open(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) domain(std::string(name) + " must lie in (0, 1)", p);
}

}  // namespace

GapSummary gap_summary(const RewardMatrix& matrix) {
  GapSummary out;
  out.delta_n.resize(matrix.users());
  out.delta_min = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < matrix.users(); ++n) {
    double gap = std::numeric_limits<double>::infinity();
    const auto row = matrix.row(n);
    for (std::size_t i = 0; i < row.size(); ++i) {
      for (std::size_t j = i + 1; j < row.size(); ++j) {
        const double d = std::fabs(row[i] - row[j]);
        if (d > 0.0 && d < gap) gap = d;
      }
    }
    if (!std::isfinite(gap)) {
      throw Error(ErrorKind::domain,
                  "user " + std::to_string(n + 1) + " has no two distinct channel means (zero gap)");
    }
    out.delta_n[n] = gap;
    out.delta_min = std::min(out.delta_min, gap);
  }
  return out;
}

double s_min(double t, double delta_min) {
  if (!(t > 1.0)) domain("s_min needs t > 1", t);
  if (!(delta_min > 0.0)) domain("s_min needs delta_min > 0", delta_min);
  return 8.0 * std::log(t) / (delta_min * delta_min);
}

double t_condition_threshold(std::size_t n_channels, double delta_min) {
  if (n_channels == 0) throw Error(ErrorKind::domain, "K must be positive");
  if (!(delta_min > 0.0)) domain("delta_min must be positive", delta_min);
  return 16.0 * static_cast<double>(n_channels) / (delta_min * delta_min);
}

double t_min_bound_from_m(double m) {
  const double b = m - 1.0;
  double disc = b * b - 4.0 * m;
  // a double root can round to a tiny negative discriminant
  if (disc < 0.0 && disc > -1e-12 * b * b) disc = 0.0;
  if (!(disc >= 0.0) || !(b > 0.0)) domain("t_min bound has no real root: (M-1)^2 < 4M, M", m);
  // smaller root of x^2 - (M-1)x + M; written via the root product M to avoid cancellation
  return 2.0 * m / (b + std::sqrt(disc));
}

double t_min_bound(std::size_t n_channels, double delta_min) {
  return t_min_bound_from_m(t_condition_threshold(n_channels, delta_min));
}

double single_initiator_prob(double epsilon, std::size_t interested) {
  if (interested == 0) throw Error(ErrorKind::domain, "at least one interested user required");
  require_probability_open(epsilon, "epsilon");
  return epsilon * std::pow(1.0 - epsilon, static_cast<double>(interested - 1));
}

double t_prime(double delta1, double epsilon, std::size_t n_users, std::size_t n_channels,
               double t_min) {
  if (n_users == 0 || n_channels == 0) throw Error(ErrorKind::domain, "N and K must be positive");
  if (!(t_min > 0.0)) domain("t_min must be positive", t_min);
  const double residual = delta1 - 4.0 / std::pow(t_min, 4.0);
  if (!(residual > 0.0 && residual < 1.0)) domain("delta1 - 4 t_min^-4 must lie in (0, 1)", residual);
  const double ps = single_initiator_prob(epsilon, n_users);
  const double frame = 2.0 * static_cast<double>(n_channels);
  return frame * std::log(residual) / std::log1p(-ps);
}

double p_smc(double delta1, double t_min, std::size_t n_users, std::size_t n_channels) {
  if (n_users == 0 || n_channels == 0) throw Error(ErrorKind::domain, "N and K must be positive");
  if (!(delta1 >= 0.0 && delta1 < 1.0)) domain("delta1 must lie in [0, 1)", delta1);
  if (!(t_min > 0.0)) domain("t_min must be positive", t_min);
  const double base = (1.0 - delta1) * (1.0 - 2.0 / std::pow(t_min, 4.0));
  if (!(base > 0.0)) domain("(1 - delta1)(1 - 2 t_min^-4) must be positive", base);
  return std::pow(base, static_cast<double>(n_users * (n_channels - 1)));
}

double convergence_time(double delta, double t_min, double tau, double p_smc_value) {
  require_probability_open(delta, "delta");
  require_probability_open(p_smc_value, "P_SMC");
  if (!(tau > 0.0)) domain("tau must be positive", tau);
  return t_min + tau * std::log(delta) / std::log1p(-p_smc_value);
}

double signalling_ratio(std::size_t n_channels, std::size_t n_users) {
  if (n_users < 3) throw Error(ErrorKind::domain, "signalling ratio undefined for N <= 2");
  if (n_channels < 2) throw Error(ErrorKind::domain, "signalling ratio needs K >= 2");
  const double k = static_cast<double>(n_channels);
  const double n = static_cast<double>(n_users);
  return 4.0 * k / ((k - 1.0) * (n - 2.0));
}

Fraction reduced(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw Error(ErrorKind::domain, "zero denominator");
  const std::uint64_t g = std::gcd(num, den);
  return g == 0 ? Fraction{0, 1} : Fraction{num / g, den / g};
}

Fraction signalling_ratio_exact(std::size_t n_channels, std::size_t n_users) {
  (void)signalling_ratio(n_channels, n_users);  // domain checks
  return reduced(4 * n_channels, (n_channels - 1) * (n_users - 2));
}

}  // namespace csmmab::bounds
