#pragma once

#include <concepts>
#include <cstdint>
#include <limits>
#include <random>

namespace pcfit {

/// Anything the optimizer can draw from: uniform integers in [0, k) and
/// uniform reals in [0, 1] (both ends inclusive).
template <typename R>
concept RandomSource = requires(R& rng, std::uint64_t k) {
  { rng.below(k) } -> std::convertible_to<std::uint64_t>;
  { rng.unit() } -> std::convertible_to<double>;
};

/// Seeded pseudo-random stream.
///
/// The integer and real conversions are written out here instead of using
/// <random> distributions, whose output is implementation-defined. A given
/// seed therefore yields the same sequence on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, k - 1]; returns 0 for k <= 1.
  std::uint64_t below(std::uint64_t k) {
    if (k <= 1) return 0;
    const std::uint64_t threshold = (0 - k) % k;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % k;
    }
  }

  /// Uniform real in [0, 1], both ends reachable.
  double unit() {
    constexpr double kScale = 1.0 / static_cast<double>((std::uint64_t{1} << 53) - 1);
    return static_cast<double>(engine_() >> 11) * kScale;
  }

  /// Uniform real in [0, 1).
  double canonical() {
    constexpr double kScale = 1.0 / static_cast<double>(std::uint64_t{1} << 53);
    return static_cast<double>(engine_() >> 11) * kScale;
  }

  /// Uniform real in [lo, hi].
  double uniform(double lo, double hi) { return lo + unit() * (hi - lo); }

 private:
  std::mt19937_64 engine_;
};

static_assert(RandomSource<Rng>);

}  // namespace pcfit
