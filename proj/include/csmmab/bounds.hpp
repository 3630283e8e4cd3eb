#pragma once

// Closed-form convergence-analysis quantities. Each function throws
// ErrorKind::domain outside its domain, naming the offending quantity.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "csmmab/model.hpp"

namespace csmmab::bounds {

struct GapSummary {
  std::vector<double> delta_n;  // smallest positive within-row gap, per user
  double delta_min = 0.0;
};

GapSummary gap_summary(const RewardMatrix& matrix);

/// 8 ln t / delta_min^2: samples per arm after which the index ordering is reliable.
double s_min(double t, double delta_min);

/// M = 16 K / delta_min^2, the coefficient of ln t in the time condition.
double t_condition_threshold(std::size_t n_channels, double delta_min);

/// (M - 1 - sqrt((M - 1)^2 - 4M)) / 2 with M from t_condition_threshold.
double t_min_bound(std::size_t n_channels, double delta_min);

/// Same expression for an explicit M.
double t_min_bound_from_m(double m);

/// epsilon (1 - epsilon)^(ell - 1).
double single_initiator_prob(double epsilon, std::size_t interested);

/// T_SF ln(delta1 - 4 t_min^-4) / ln(1 - epsilon (1 - epsilon)^(N - 1)), T_SF = 2K.
double t_prime(double delta1, double epsilon, std::size_t n_users, std::size_t n_channels,
               double t_min);

/// [(1 - delta1)(1 - 2 t_min^-4)]^(N (K - 1)).
double p_smc(double delta1, double t_min, std::size_t n_users, std::size_t n_channels);

/// t_min + tau ln(delta) / ln(1 - p_smc).
double convergence_time(double delta, double t_min, double tau, double p_smc_value);

/// 4K / ((K - 1)(N - 2)); needs N >= 3, K >= 2.
double signalling_ratio(std::size_t n_channels, std::size_t n_users);

/// The same ratio as an exact reduced fraction.
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  friend bool operator==(const Fraction&, const Fraction&) = default;
};
Fraction reduced(std::uint64_t num, std::uint64_t den);
Fraction signalling_ratio_exact(std::size_t n_channels, std::size_t n_users);

}  // namespace csmmab::bounds
