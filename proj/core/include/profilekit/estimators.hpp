#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "profilekit/distribution.hpp"
#include "profilekit/profile.hpp"
#include "profilekit/random.hpp"
#include "profilekit/sampling.hpp"

namespace profilekit {

/// A natural estimator: one probability per multiplicity class.
struct NaturalEstimate {
  std::string method;
  std::uint64_t n = 0;
  std::optional<std::uint64_t> alphabet_size;
  /// phi_mu for every class, including mu = 0 (unseen symbols) when the
  /// alphabet is known and some symbols are unseen.
  std::map<std::uint64_t, std::uint64_t> prevalence;
  /// q_mu, the probability given to each symbol of class mu.
  std::map<std::uint64_t, double> per_class;

  /// q_mu; 0 for classes the estimate does not cover.
  double q(std::uint64_t mu) const noexcept;
  /// sum_mu phi_mu q_mu.
  double total_mass() const noexcept;
  /// -sum_mu phi_mu q_mu ln q_mu.
  double entropy() const noexcept;
};

NaturalEstimate empirical(const Profile& profile, std::optional<std::uint64_t> alphabet_size = std::nullopt);

/// Class mass (mu+1) phi_{mu+1} / n when phi_{mu+1} > 0, otherwise mu phi_mu / n;
/// unseen symbols get phi_1 / n when the alphabet is known; masses renormalized.
NaturalEstimate good_turing(const Profile& profile, std::optional<std::uint64_t> alphabet_size = std::nullopt);

/// (mu + beta) / (n + beta |X|).
NaturalEstimate dirichlet(const Profile& profile, double beta, std::uint64_t alphabet_size);

/// lambda / |X| + (1 - lambda) mu / n with the closed-form shrinkage intensity
/// lambda = clamp((1 - sum q^2) / ((n - 1) sum (1/|X| - q)^2), 0, 1).
NaturalEstimate james_stein(const Profile& profile, std::uint64_t alphabet_size);

/// Raises every class probability to at least q_min and renormalizes.
/// Requires a known alphabet.
NaturalEstimate with_floor(const NaturalEstimate& estimate, double q_min);

/// The floor 1/n^4 used whenever an estimator leaves unseen symbols at zero.
double default_floor(std::uint64_t n) noexcept;

/// True per-class masses P_mu = sum_{x: mu_x = mu} p_x, including mu = 0.
struct ClassMasses {
  std::map<std::uint64_t, double> mass;
  std::map<std::uint64_t, std::uint64_t> prevalence;
  double neg_entropy = 0.0;  // sum_x p_x ln p_x
};

/// Throws std::invalid_argument when a sampled label is outside p's support.
ClassMasses class_masses(const DiscreteDistribution& p, const SampleCounts& counts);

struct OracleResult {
  NaturalEstimate estimate;
  double min_kl = 0.0;
};

/// q_mu = P_mu / phi_mu; the KL-optimal natural estimator.
OracleResult best_natural_oracle(const DiscreteDistribution& p, const SampleCounts& counts);

/// KL(p || q) where symbol x receives q_{mu_x}. +inf when p puts mass on a
/// class the estimate leaves at zero.
double kl(const DiscreteDistribution& p, const SampleCounts& counts, const NaturalEstimate& estimate);

/// KL(p || estimate) - min_kl, computed as sum_mu P_mu ln(P_mu / (phi_mu q_mu)).
double excess_loss(const DiscreteDistribution& p, const SampleCounts& counts, const NaturalEstimate& estimate);

struct LossReport {
  double kl = 0.0;
  double l1 = 0.0;
  double entropy_gap = 0.0;
  double excess_kl = 0.0;
};

LossReport loss_report(const DiscreteDistribution& p, const SampleCounts& counts, const NaturalEstimate& estimate);

/// Per-symbol probabilities of the estimate over p's labels.
std::vector<double> expand(const NaturalEstimate& estimate, const DiscreteDistribution& p, const SampleCounts& counts);

double entropy(const DiscreteDistribution& p);
double entropy(std::span<const double> p);
double entropy_gap(std::span<const double> p, std::span<const double> q);

/// (H(q) - H(p)) - (KL(p||q) + sum_x (p_x - q_x) ln q_x); zero whenever q > 0 everywhere.
double entropy_decomposition_residual(std::span<const double> p, std::span<const double> q);

struct CollisionResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject = false;
};

/// T = k (sum phi_mu mu^2 - n) / (n^2 - n); reject iff T >= 1 + 3 eps^2 / 4.
CollisionResult collision_tester(const Profile& profile, std::uint64_t k, double epsilon);

/// Returns a sorted probability vector maximizing the profile likelihood.
using PmlSolver = std::function<std::vector<double>(const Profile&)>;

struct PmlTestResult {
  bool reject = false;
  bool by_max_multiplicity = false;
  double multiplicity_threshold = 0.0;
  double distance = 0.0;  // ||P_phi - u||_2, when the solver ran
  double distance_threshold = 0.0;
};

/// Rejects when the largest multiplicity reaches 3 max{1, n/k} ln k, otherwise
/// when the PML distribution is at l2 distance >= 3 eps / (4 sqrt k) from uniform.
PmlTestResult pml_uniformity_tester(const Profile& profile, std::uint64_t k, double epsilon, const PmlSolver& solver);

struct ExtremumProbe {
  double statistic = 0.0;           // T(phi)
  bool predicted_local_min = false;  // T > 1
  bool probed_local_min = false;     // majority of second differences positive
  bool agrees = false;
  std::uint32_t positive_directions = 0;
  std::uint32_t directions = 0;
  double min_second_difference = 0.0;
  double max_second_difference = 0.0;
};

/// Probes the profile likelihood at the uniform distribution over k symbols
/// with central second differences along random sum-zero unit directions.
/// Throws std::invalid_argument for single-symbol profiles or when the profile
/// has more distinct symbols than k.
ExtremumProbe local_extremum_check(const Profile& profile, std::uint64_t k, Rng& rng, std::uint32_t directions = 32,
                                   double step = 1e-4);

/// Lower median. Throws std::invalid_argument on empty input.
double median_boost(std::span<const double> estimates);

/// 4 ceil(ln(1/beta) / ln(1/(2 alpha))) copies drive a per-copy failure rate
/// alpha < 1/2 down to beta.
std::uint64_t median_trick_copies(double beta, double alpha);

}  // namespace profilekit
