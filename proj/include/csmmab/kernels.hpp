#pragma once

// Per-channel arithmetic kernels. Every kernel has a scalar reference and a
// vectorized variant; the variants are bit-identical to the reference, so the
// dispatch choice never changes simulation output.

#include <cstddef>
#include <span>
#include <string_view>

namespace csmmab::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// True if the running CPU (and this build) can execute `isa`.
bool isa_available(Isa isa) noexcept;

/// The variant used by the dispatching entry points below.
Isa active_isa() noexcept;

/// Override runtime selection (tests, benchmarking). Throws csmmab::Error if
/// the requested ISA is unavailable.
void force_isa(Isa isa);

/// out[k] = mu_hat[k] + sqrt(2 log_t / samples[k]); +inf where samples[k] == 0.
/// All spans must have equal length.
void ucb_indices(std::span<const double> mu_hat, std::span<const double> samples, double log_t,
                 std::span<double> out);

/// Number of entries strictly greater than `threshold`.
std::size_t count_greater(std::span<const double> values, double threshold);

namespace scalar {
void ucb_indices(std::span<const double> mu_hat, std::span<const double> samples, double log_t,
                 std::span<double> out);
std::size_t count_greater(std::span<const double> values, double threshold);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define CSMMAB_HAVE_AVX2_KERNELS 1
namespace avx2 {
void ucb_indices(std::span<const double> mu_hat, std::span<const double> samples, double log_t,
                 std::span<double> out);
std::size_t count_greater(std::span<const double> values, double threshold);
}  // namespace avx2
#else
#define CSMMAB_HAVE_AVX2_KERNELS 0
#endif

}  // namespace csmmab::kernels
