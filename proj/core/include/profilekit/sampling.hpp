#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "profilekit/distribution.hpp"
#include "profilekit/profile.hpp"
#include "profilekit/random.hpp"

namespace profilekit {

/// Draws i.i.d. labels from a DiscreteDistribution.
///
/// A run is selected first (inverse CDF for <= 64 positive runs, Walker/Vose
/// alias table otherwise), then a label uniformly inside the run. Given the
/// same Rng state, the emitted label stream is identical on every platform.
class Sampler {
 public:
  explicit Sampler(const DiscreteDistribution& p);

  Symbol operator()(Rng& rng) const;

 private:
  std::size_t pick_run(Rng& rng) const;

  Symbol first_label_ = 0;
  std::vector<std::uint64_t> run_offset_;
  std::vector<std::uint64_t> run_count_;
  // Inverse-CDF path.
  std::vector<double> cumulative_;
  // Alias path.
  std::vector<double> alias_probability_;
  std::vector<std::uint32_t> alias_;
};

std::vector<Symbol> sample(const DiscreteDistribution& p, std::uint64_t n, Rng& rng);

/// Sample of random length N ~ Poisson(n).
std::vector<Symbol> sample_poissonized(const DiscreteDistribution& p, std::uint64_t n, Rng& rng);

/// Symbol -> multiplicity table of a sample.
class SampleCounts {
 public:
  SampleCounts() = default;
  static SampleCounts from_sequence(std::span<const Symbol> sequence);

  void add(Symbol symbol, std::uint64_t times = 1);
  std::uint64_t length() const noexcept { return length_; }
  std::uint64_t count(Symbol symbol) const noexcept;
  const std::unordered_map<Symbol, std::uint64_t>& counts() const noexcept { return counts_; }
  std::size_t distinct() const noexcept { return counts_.size(); }
  Profile profile() const;

 private:
  std::unordered_map<Symbol, std::uint64_t> counts_;
  std::uint64_t length_ = 0;
};

SampleCounts sample_counts(const DiscreteDistribution& p, std::uint64_t n, Rng& rng);

/// Profile of an i.i.d. sample of size n, counted without materializing the
/// sequence (dense counters when the support is small enough).
Profile sample_profile(const DiscreteDistribution& p, std::uint64_t n, Rng& rng);

/// Profile of a Poissonized sample (length N ~ Poisson(n)).
Profile sample_profile_poissonized(const DiscreteDistribution& p, std::uint64_t n, Rng& rng);

}  // namespace profilekit
