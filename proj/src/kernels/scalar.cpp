#include <cmath>

#include "csmmab/agent.hpp"
#include "csmmab/kernels.hpp"

namespace csmmab::kernels::scalar {

void ucb_indices(std::span<const double> mu_hat, std::span<const double> samples, double log_t,
                 std::span<double> out) {
  const double numerator = 2.0 * log_t;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = samples[k] == 0.0 ? kUnsampledIndex : mu_hat[k] + std::sqrt(numerator / samples[k]);
  }
}

std::size_t count_greater(std::span<const double> values, double threshold) {
  std::size_t count = 0;
  for (double v : values) count += v > threshold ? 1 : 0;
  return count;
}

}  // namespace csmmab::kernels::scalar
