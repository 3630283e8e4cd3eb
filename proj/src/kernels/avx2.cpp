// AVX2 variants. Only these functions carry the avx2 target; the rest of the
// translation unit stays baseline so no AVX2 code leaks into shared inlines.

#include "csmmab/kernels.hpp"

#if CSMMAB_HAVE_AVX2_KERNELS

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace csmmab::kernels::avx2 {

__attribute__((target("avx2"))) void ucb_indices(std::span<const double> mu_hat,
                                                 std::span<const double> samples, double log_t,
                                                 std::span<double> out) {
  const std::size_t n = out.size();
  const double numerator = 2.0 * log_t;
  const __m256d num = _mm256_set1_pd(numerator);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d s = _mm256_loadu_pd(samples.data() + k);
    const __m256d mu = _mm256_loadu_pd(mu_hat.data() + k);
    const __m256d bonus = _mm256_sqrt_pd(_mm256_div_pd(num, s));
    const __m256d index = _mm256_add_pd(mu, bonus);
    const __m256d unsampled = _mm256_cmp_pd(s, zero, _CMP_EQ_OQ);
    _mm256_storeu_pd(out.data() + k, _mm256_blendv_pd(index, inf, unsampled));
  }
  for (; k < n; ++k) {
    out[k] = samples[k] == 0.0 ? std::numeric_limits<double>::infinity()
                               : mu_hat[k] + std::sqrt(numerator / samples[k]);
  }
}

__attribute__((target("avx2,popcnt"))) std::size_t count_greater(std::span<const double> values,
                                                                  double threshold) {
  const std::size_t n = values.size();
  const __m256d thr = _mm256_set1_pd(threshold);
  std::size_t count = 0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d v = _mm256_loadu_pd(values.data() + k);
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(v, thr, _CMP_GT_OQ));
    count += static_cast<std::size_t>(_mm_popcnt_u32(static_cast<unsigned>(mask)));
  }
  for (; k < n; ++k) count += values[k] > threshold ? 1 : 0;
  return count;
}

}  // namespace csmmab::kernels::avx2

#endif
