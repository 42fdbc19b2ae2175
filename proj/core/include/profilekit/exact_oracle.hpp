#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "profilekit/distribution.hpp"
#include "profilekit/profile.hpp"

namespace profilekit {

/// Exact law of the profile of an i.i.d. length-n sample.
struct ProfileDistribution {
  std::uint64_t n = 0;
  std::uint64_t k = 0;  // positive support size of the generating distribution
  std::map<Profile, double> entries;

  double total() const;
};

/// Enumerates every count vector of n over the positive support (there are
/// C(n+k-1, k-1) of them), weights each by its multinomial probability, and
/// aggregates by profile. Throws std::length_error when the count exceeds max_states.
ProfileDistribution profile_distribution_exact(const DiscreteDistribution& p, std::uint64_t n,
                                               std::uint64_t max_states = 10'000'000);

/// Shannon entropy H(Phi^n) in nats.
double profile_entropy_exact(const ProfileDistribution& dist);
double profile_entropy_exact(const DiscreteDistribution& p, std::uint64_t n);

struct DimensionMoments {
  double mean = 0.0;
  double variance = 0.0;
};

DimensionMoments dimension_moments_exact(const ProfileDistribution& dist);
DimensionMoments dimension_moments_exact(const DiscreteDistribution& p, std::uint64_t n);

/// Smallest number of profiles whose total probability is >= 1 - delta.
std::uint64_t typical_cardinality(const ProfileDistribution& dist, double delta);
std::uint64_t typical_cardinality(const DiscreteDistribution& p, std::uint64_t n, double delta);

using BigInt = boost::multiprecision::cpp_int;

/// Number of integer partitions P(n), exact, for n <= 10^4.
BigInt partition_count(std::uint32_t n);

/// P(0..n_max) by Euler's pentagonal-number recurrence.
std::vector<BigInt> partition_counts(std::uint32_t n_max);

/// Natural log of a positive big integer.
double log_big(const BigInt& value);

/// Pr(phi(X^n) = profile) for X^n ~ p, read off the exact enumeration at
/// n = profile.length().
double profile_probability(const DiscreteDistribution& p, const Profile& profile);

/// Same probability by summing over assignments of the profile's
/// multiplicities to symbols (a DP over per-class remaining prevalences).
/// `probs` lists the distribution's probabilities; zeros are allowed.
double profile_probability_direct(std::span<const double> probs, const Profile& profile);

struct PmlResult {
  std::vector<double> probabilities;  // sorted descending, support <= K
  double likelihood = 0.0;
  std::uint64_t candidates = 0;
};

/// Brute-force profile maximum likelihood over sorted probability vectors
/// whose entries are multiples of 1/grid_cells with support <= support_cap.
/// Ties go to the smaller support, then the lexicographically smaller vector.
/// Requires profile length <= 10 and support_cap <= 8.
PmlResult pml_brute(const Profile& profile, std::uint64_t support_cap, std::uint64_t grid_cells = 40);

}  // namespace profilekit
