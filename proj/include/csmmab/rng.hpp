#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace csmmab {

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for stream `stream` under `master`. Distinct streams are decorrelated.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

/// Replayable random stream. Conversions are spelled out here rather than
/// delegated to <random> distributions so the draw sequence is identical on
/// every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform on {0, ..., n-1}; n must be positive.
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace csmmab
