#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "profilekit/distribution.hpp"

namespace profilekit {

// Interval partition of (0, 1]: I_j = ((j-1)^2 ln(n)/n, j^2 ln(n)/n] for
// j = 1..J_max with J_max = ceil(sqrt(n / ln n)). Sample sizes are real so
// that aligned (n, m) pairs with integral sqrt((n ln m)/(m ln n)) can be used.

/// j^2 ln(n) / n. Every caller that places a probability on an interval edge
/// uses this exact expression.
double interval_upper_edge(std::uint64_t j, double n) noexcept;

std::uint64_t interval_count(double n);

/// Unique j with p in I_j. Throws std::invalid_argument for p outside (0, 1] or n <= 1.
std::uint64_t interval_index(double p, double n);

struct HsTerm {
  std::uint64_t j = 0;
  double count = 0.0;  // number of probabilities in I_j
  double cap = 0.0;    // j ln n
  double term = 0.0;   // min(count, cap)
};

struct HsReport {
  double n = 0.0;
  std::vector<HsTerm> terms;  // populated intervals only, ascending j
  double total = 0.0;
  bool degenerate = false;  // n < 3: ln n <= 1
};

/// H^S_n(p) = sum_j min{#probabilities in I_j, j ln n}.
HsReport hs(const DiscreteDistribution& p, double n);

struct EnReport {
  double value = 0.0;
  double truncation_error_bound = 0.0;
  std::uint64_t window_lo = 0;  // smallest multiplicity index evaluated
  std::uint64_t window_hi = 0;  // largest multiplicity index evaluated
};

/// E_n(p) = sum_{i=1}^n (1 - prod_x (1 - Poi(n p_x; i))), the expected number
/// of distinct multiplicities <= n in a Poisson(n)-size sample. Each symbol
/// contributes only for i within n p_x +- 12 sqrt(n p_x + 1); the discarded
/// Poisson mass is bounded by Chernoff and returned as truncation_error_bound.
/// Throws std::domain_error when tol cannot be met (or is below double round-off).
EnReport en(const DiscreteDistribution& p, std::uint64_t n, double tol = 1e-6);

/// sqrt((n ln n)/(m ln m)) * hs_m; requires n >= m >= 16.
double hs_scale_upper(double hs_m, double m, double n);

/// The three-branch U_n^k(alpha); k = nullopt means infinite support (alpha > 1 only).
double power_law_u(double alpha, std::optional<double> k, double n);

/// 7 ln n + e^2 * min{k, U_n^k(alpha)}.
double power_law_bound(double alpha, std::optional<double> k, double n);

/// Bound split into the distribution-dependent shape factor and the ln n
/// factor whose constant is unspecified.
struct ShapeBound {
  double shape_factor = 0.0;
  double log_factor = 0.0;
};

/// 1 + min{sigma, n / sigma}.
ShapeBound log_concave_bound(double sigma, double n);

/// 1 + min{sum sigma_i, max_i n / sigma_i}.
ShapeBound mixture_bound(std::span<const double> sigmas, double n);

/// min{(n t^2)^(1/3), sqrt(n)}.
double histogram_bound(double t, double n);

}  // namespace profilekit
