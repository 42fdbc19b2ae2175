#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "profilekit/profile.hpp"

namespace profilekit {

/// A block of `count` consecutive symbols sharing one probability value.
struct ProbabilityRun {
  double probability = 0.0;
  std::uint64_t count = 0;

  friend bool operator==(const ProbabilityRun&, const ProbabilityRun&) = default;
};

/// Finite distribution over the contiguous integer labels
/// [first_label, first_label + support_size).
///
/// Probabilities are stored as runs of equal values, so constructions with
/// ~n^2 filler symbols (mass 1/n^2 each) stay O(#distinct values) in memory.
/// Everything downstream that depends only on the probability multiset
/// (entropy proxy, E_n, oracles) works run-by-run.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;

  /// Throws std::invalid_argument unless probabilities are finite, in [0, 1],
  /// and sum to 1 within 1e-9.
  static DiscreteDistribution from_probabilities(std::span<const double> probs, Symbol first_label = 0);
  static DiscreteDistribution from_runs(std::vector<ProbabilityRun> runs, Symbol first_label = 0);

  std::uint64_t support_size() const noexcept { return support_size_; }
  std::uint64_t positive_support_size() const noexcept;
  Symbol first_label() const noexcept { return first_label_; }
  Symbol last_label() const noexcept { return first_label_ + static_cast<Symbol>(support_size_) - 1; }
  bool contains(Symbol label) const noexcept;

  /// Probability of `label`; zero outside the support.
  double probability(Symbol label) const noexcept;
  /// Index of the run containing `label`; label must be in the support.
  std::size_t run_of(Symbol label) const noexcept;

  std::span<const ProbabilityRun> runs() const noexcept { return runs_; }
  /// Label of the first symbol of run r.
  Symbol run_first_label(std::size_t r) const noexcept { return first_label_ + static_cast<Symbol>(run_offsets_[r]); }

  /// One probability per label. Throws std::length_error above 10^7 symbols.
  std::vector<double> dense() const;

  /// Mass removed by tail truncation before renormalization (0 if none).
  double truncated_mass() const noexcept { return truncated_mass_; }
  DiscreteDistribution with_truncated_mass(double mass) const;

  friend bool operator==(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    return a.first_label_ == b.first_label_ && a.runs_ == b.runs_;
  }

 private:
  void index_runs();

  Symbol first_label_ = 0;
  std::vector<ProbabilityRun> runs_;
  std::vector<std::uint64_t> run_offsets_;
  std::uint64_t support_size_ = 0;
  double truncated_mass_ = 0.0;
};

// --- Families ----------------------------------------------------------------

/// Uniform over labels 1..k. Throws std::invalid_argument for k = 0.
DiscreteDistribution make_uniform(std::uint64_t k);

/// p_x proportional to x^-alpha on [k] (labels 1..k). With k = nullopt the
/// support is infinite and requires alpha > 1; it is truncated where the tail
/// mass drops below 1e-10, or at `max_support` symbols, and renormalized.
DiscreteDistribution make_power_law(double alpha, std::optional<std::uint64_t> k,
                                    std::uint64_t max_support = 1'000'000);

/// Normalizer sum_{i<=k} i^-alpha, summed smallest-term first in long double.
long double power_law_normalizer(double alpha, std::uint64_t k);

/// t-histogram: part i has part_sizes[i] symbols of probability part_masses[i] / part_sizes[i].
DiscreteDistribution make_histogram(std::span<const std::uint64_t> part_sizes,
                                    std::span<const double> part_masses);

/// The t-histogram whose entropy proxy is large for its (t, n): filler
/// symbols of mass 1/n^2 plus groups of ~j*ln(n) symbols of mass j^2 ln(n)/n.
/// Throws std::invalid_argument when the groups alone exceed unit mass.
DiscreteDistribution histogram_lower_bound_instance(std::uint64_t t, std::uint64_t n);

/// Group scale s = round(sqrt(D / ln n)) of the excess-loss construction.
std::uint64_t adversarial_scale(double target_dimension, std::uint64_t n);

/// Randomized hard instance for competitive estimation: for each i in
/// {s, ..., 2s}, round(i ln n) symbols of mass i^2 ln^2 n / n (flip = 0) or
/// (i^2 ln^2 n + i ln n) / n (flip = 1), plus 1/n^2 filler.
/// coin_flips must hold at least s + 1 entries.
DiscreteDistribution excess_loss_adversarial_instance(double target_dimension, std::uint64_t n,
                                                      std::span<const std::uint8_t> coin_flips);

// --- Continuous models and discretization -------------------------------------

struct ContinuousModel {
  std::function<double(double)> cdf;
  /// Optional 1 - cdf, evaluated directly for accuracy in the right tail.
  std::function<double(double)> survival;
  /// Optional density, used by shape checks only.
  std::function<double(double)> pdf;
  double mean = 0.0;
  double variance = 0.0;

  /// Mass of (a, b]; uses the survival function right of the median when available.
  double interval_mass(double a, double b) const;
};

ContinuousModel gaussian_model(double mean, double sigma);
ContinuousModel laplace_model(double location, double scale);
/// Exponential with the given rate, shifted to start at `origin`.
ContinuousModel exponential_model(double rate, double origin = 0.0);

/// The integer z with x in (z - 1/2, z + 1/2].
std::int64_t nearest_integer(double x) noexcept;

/// p(z) = F(z + 1/2) - F(z - 1/2) over the smallest window around the mode
/// capturing mass >= 1 - tail_epsilon, renormalized. Throws
/// std::invalid_argument if the cdf is detected decreasing or leaves [0, 1].
DiscreteDistribution discretize(const ContinuousModel& model, double tail_epsilon = 1e-12,
                                std::uint64_t max_range = 100'000'000);

// --- Shape and moments --------------------------------------------------------

struct LogConcavity {
  bool log_concave = true;
  std::optional<Symbol> first_violation;
};

/// Contiguous positive support and p_x^2 >= p_{x-1} p_{x+1} (1 - 1e-12) at every interior x.
LogConcavity is_log_concave(const DiscreteDistribution& p);

/// True if the positive probabilities rise then fall (ties allowed).
bool is_unimodal(const DiscreteDistribution& p);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

Moments moments(const DiscreteDistribution& p);

/// Weighted mixture over the union of label ranges. Weights must be
/// nonnegative and sum to 1 within 1e-9.
DiscreteDistribution mixture(std::span<const DiscreteDistribution> components, std::span<const double> weights);

// --- Distances ---------------------------------------------------------------

/// sum_x |p_x - q_x| over the union of supports.
double l1_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// sum_x max{p_x, q_x} * 1[p_x != q_x].
double weighted_hamming(const DiscreteDistribution& p, const DiscreteDistribution& q);

}  // namespace profilekit
