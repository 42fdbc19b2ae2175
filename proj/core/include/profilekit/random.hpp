#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace profilekit {

/// SplitMix64 finalizer; used for seeding and deterministic seed derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stable 64-bit mix of a master seed and a path of indices (suite id, case
/// index, trial index, ...). Appending indices never changes seeds of other paths.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

/// xoshiro256** generator. All derived variates (uniforms, bounded integers,
/// Poisson) are implemented here so streams are identical across platforms;
/// std:: distributions are deliberately not used.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }
  result_type operator()() noexcept { return next(); }

  std::uint64_t next() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound); bound must be > 0. Lemire's method with rejection.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Standard normal via the polar method.
  double normal() noexcept;

  /// Poisson(lambda) variate; inversion for small lambda, PTRS otherwise.
  std::uint64_t poisson(double lambda) noexcept;

 private:
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace profilekit
