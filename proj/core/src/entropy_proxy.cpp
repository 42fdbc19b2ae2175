#include "profilekit/entropy_proxy.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <map>
#include <stdexcept>

namespace profilekit {

namespace {

constexpr double kWindowSigmas = 12.0;

// log of a Chernoff bound on Pr(Poi(lambda) >= a) for a > lambda, or on
// Pr(Poi(lambda) <= a) for a < lambda.
double log_poisson_tail(double lambda, double a) {
  if (a <= 0.0) return -lambda;  // Pr(X <= 0)
  return -lambda + a * (1.0 + std::log(lambda / a));
}

}  // namespace

double interval_upper_edge(std::uint64_t j, double n) noexcept {
  const double jd = static_cast<double>(j);
  return jd * jd * std::log(n) / n;
}

std::uint64_t interval_count(double n) {
  if (!(n > 1.0)) throw std::invalid_argument("interval_count: n must be > 1");
  return static_cast<std::uint64_t>(std::ceil(std::sqrt(n / std::log(n))));
}

std::uint64_t interval_index(double p, double n) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("interval_index: p must lie in (0, 1]");
  const std::uint64_t j_max = interval_count(n);
  auto j = static_cast<std::uint64_t>(std::ceil(std::sqrt(p * n / std::log(n))));
  j = std::clamp<std::uint64_t>(j, 1, j_max);
  while (j > 1 && interval_upper_edge(j - 1, n) >= p) --j;
  while (j < j_max && interval_upper_edge(j, n) < p) ++j;
  return j;
}

HsReport hs(const DiscreteDistribution& p, double n) {
  if (!(n > 1.0)) throw std::invalid_argument("hs: n must be > 1");
  HsReport report;
  report.n = n;
  report.degenerate = n < 3.0;
  std::map<std::uint64_t, double> counts;
  for (const auto& run : p.runs()) {
    if (run.probability <= 0.0) continue;
    counts[interval_index(run.probability, n)] += static_cast<double>(run.count);
  }
  const double log_n = std::log(n);
  for (const auto& [j, count] : counts) {
    const double cap = static_cast<double>(j) * log_n;
    const double term = std::min(count, cap);
    report.terms.push_back({j, count, cap, term});
    report.total += term;
  }
  return report;
}

EnReport en(const DiscreteDistribution& p, std::uint64_t n, double tol) {
  if (n == 0) throw std::invalid_argument("en: n must be >= 1");
  if (!(tol > 0.0)) throw std::domain_error("en: tol must be positive");
  const double nd = static_cast<double>(n);

  struct Window {
    double lambda;
    double count;
    std::uint64_t lo, hi;
  };
  std::vector<Window> windows;
  std::uint64_t max_hi = 0;
  long double truncation = 0;
  for (const auto& run : p.runs()) {
    if (run.probability <= 0.0) continue;
    const double lambda = nd * run.probability;
    const double half = kWindowSigmas * std::sqrt(lambda + 1.0);
    const double lo_real = std::max(1.0, std::floor(lambda - half));
    const double hi_real = std::min(nd, std::ceil(lambda + half));
    if (hi_real < lo_real) continue;
    const auto lo = static_cast<std::uint64_t>(lo_real);
    const auto hi = static_cast<std::uint64_t>(hi_real);
    windows.push_back({lambda, static_cast<double>(run.count), lo, hi});
    max_hi = std::max(max_hi, hi);
    // Discarded Poisson mass at indices in [1, lo) and (hi, n].
    long double dropped = 0;
    if (lo > 1) dropped += std::exp(static_cast<long double>(log_poisson_tail(lambda, static_cast<double>(lo - 1))));
    if (hi < n) dropped += std::exp(static_cast<long double>(log_poisson_tail(lambda, static_cast<double>(hi + 1))));
    truncation += dropped * run.count;
  }

  std::vector<double> log_gamma(max_hi + 2);
  for (std::uint64_t i = 0; i < log_gamma.size(); ++i) log_gamma[i] = std::lgamma(static_cast<double>(i) + 1.0);

  // log prod_x (1 - Poi(n p_x; i)) accumulated per multiplicity index i.
  std::vector<double> log_miss(max_hi + 1, 0.0);
  EnReport report;
  report.window_lo = max_hi;
  for (const auto& w : windows) {
    const double log_lambda = std::log(w.lambda);
    for (std::uint64_t i = w.lo; i <= w.hi; ++i) {
      const double pmf = std::exp(-w.lambda + static_cast<double>(i) * log_lambda - log_gamma[i]);
      log_miss[i] += w.count * std::log1p(-pmf);
    }
    report.window_lo = std::min(report.window_lo, w.lo);
  }
  report.window_hi = max_hi;

  long double value = 0;
  for (std::uint64_t i = 1; i <= max_hi; ++i) value += -std::expm1(log_miss[i]);
  report.value = static_cast<double>(value);
  report.truncation_error_bound = static_cast<double>(truncation);

  const double round_off = 64.0 * DBL_EPSILON * std::max(1.0, report.value);
  if (tol < round_off) throw std::domain_error("en: tol below double-precision round-off");
  if (report.truncation_error_bound > tol) throw std::domain_error("en: truncation error exceeds tol");
  return report;
}

double hs_scale_upper(double hs_m, double m, double n) {
  if (!(m >= 16.0 && n >= m)) throw std::invalid_argument("hs_scale_upper: requires n >= m >= 16");
  return std::sqrt((n * std::log(n)) / (m * std::log(m))) * hs_m;
}

double power_law_u(double alpha, std::optional<double> k, double n) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("power_law_u: alpha must be >= 0");
  if (!(n > 1.0)) throw std::invalid_argument("power_law_u: n must be > 1");
  const double inv_log_k = k ? 1.0 / std::log(*k) : 0.0;  // 1/ln(inf) = 0; k = 1 gives +inf
  if (alpha >= 1.0 + inv_log_k) return std::pow(n, 1.0 / (1.0 + alpha));
  if (alpha >= 1.0) return std::pow(n / std::log(n), 1.0 / (1.0 + alpha));
  if (!k) throw std::invalid_argument("power_law_u: alpha < 1 requires finite k");
  const double root = std::sqrt(n);
  return root * std::min(*k / root, std::pow(root / *k, (1.0 - alpha) / (1.0 + alpha)));
}

double power_law_bound(double alpha, std::optional<double> k, double n) {
  const double u = power_law_u(alpha, k, n);
  const double capped = k ? std::min(*k, u) : u;
  return 7.0 * std::log(n) + std::exp(2.0) * capped;
}

ShapeBound log_concave_bound(double sigma, double n) {
  if (!(sigma > 0.0)) throw std::invalid_argument("log_concave_bound: sigma must be > 0");
  return {1.0 + std::min(sigma, n / sigma), std::log(n)};
}

ShapeBound mixture_bound(std::span<const double> sigmas, double n) {
  if (sigmas.empty()) throw std::invalid_argument("mixture_bound: no components");
  double sum = 0.0, max_ratio = 0.0;
  for (double s : sigmas) {
    if (!(s > 0.0)) throw std::invalid_argument("mixture_bound: sigma must be > 0");
    sum += s;
    max_ratio = std::max(max_ratio, n / s);
  }
  return {1.0 + std::min(sum, max_ratio), std::log(n)};
}

double histogram_bound(double t, double n) { return std::min(std::cbrt(n * t * t), std::sqrt(n)); }

}  // namespace profilekit
