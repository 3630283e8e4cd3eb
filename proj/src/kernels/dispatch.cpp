#include <atomic>

#include "csmmab/error.hpp"
#include "csmmab/kernels.hpp"

namespace csmmab::kernels {
namespace {

Isa detect() noexcept {
#if CSMMAB_HAVE_AVX2_KERNELS
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt")) return Isa::avx2;
#endif
  return Isa::scalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return detect() == Isa::avx2;
  }
  return false;
}

Isa active_isa() noexcept { return selected().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw Error(ErrorKind::contract_violation,
                "kernel ISA " + std::string(isa_name(isa)) + " is not available on this CPU");
  }
  selected().store(isa, std::memory_order_relaxed);
}

void ucb_indices(std::span<const double> mu_hat, std::span<const double> samples, double log_t,
                 std::span<double> out) {
#if CSMMAB_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::ucb_indices(mu_hat, samples, log_t, out);
#endif
  scalar::ucb_indices(mu_hat, samples, log_t, out);
}

std::size_t count_greater(std::span<const double> values, double threshold) {
#if CSMMAB_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::avx2) return avx2::count_greater(values, threshold);
#endif
  return scalar::count_greater(values, threshold);
}

}  // namespace csmmab::kernels
