#include "profilekit/sampling.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace profilekit {

namespace {

constexpr std::size_t kAliasThreshold = 64;
constexpr std::uint64_t kDenseCountLimit = 1u << 22;

}  // namespace

Sampler::Sampler(const DiscreteDistribution& p) : first_label_(p.first_label()) {
  std::vector<double> weights;
  for (std::size_t r = 0; r < p.runs().size(); ++r) {
    const auto& run = p.runs()[r];
    if (run.probability <= 0.0) continue;
    run_offset_.push_back(static_cast<std::uint64_t>(p.run_first_label(r) - p.first_label()));
    run_count_.push_back(run.count);
    weights.push_back(run.probability * static_cast<double>(run.count));
  }
  if (weights.size() <= kAliasThreshold) {
    cumulative_.resize(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) cumulative_[i] = (acc += weights[i]);
    return;
  }
  // Vose's alias method; index stacks keep construction deterministic.
  const std::size_t m = weights.size();
  if (m > std::numeric_limits<std::uint32_t>::max()) throw std::length_error("Sampler: too many runs");
  long double total = 0;
  for (double w : weights) total += w;
  std::vector<double> scaled(m);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < m; ++i) {
    scaled[i] = static_cast<double>(weights[i] * m / total);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  alias_probability_.assign(m, 1.0);
  alias_.resize(m);
  for (std::size_t i = 0; i < m; ++i) alias_[i] = static_cast<std::uint32_t>(i);
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    alias_probability_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
}

std::size_t Sampler::pick_run(Rng& rng) const {
  if (!cumulative_.empty()) {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }
  const auto column = static_cast<std::size_t>(rng.below(alias_.size()));
  return rng.uniform() < alias_probability_[column] ? column : alias_[column];
}

Symbol Sampler::operator()(Rng& rng) const {
  const std::size_t r = pick_run(rng);
  const std::uint64_t inside = run_count_[r] == 1 ? 0 : rng.below(run_count_[r]);
  return first_label_ + static_cast<Symbol>(run_offset_[r] + inside);
}

std::vector<Symbol> sample(const DiscreteDistribution& p, std::uint64_t n, Rng& rng) {
  Sampler sampler(p);
  std::vector<Symbol> out(n);
  for (auto& x : out) x = sampler(rng);
  return out;
}

std::vector<Symbol> sample_poissonized(const DiscreteDistribution& p, std::uint64_t n, Rng& rng) {
  const std::uint64_t length = rng.poisson(static_cast<double>(n));
  return sample(p, length, rng);
}

SampleCounts SampleCounts::from_sequence(std::span<const Symbol> sequence) {
  SampleCounts c;
  for (Symbol s : sequence) c.add(s);
  return c;
}

void SampleCounts::add(Symbol symbol, std::uint64_t times) {
  counts_[symbol] += times;
  length_ += times;
}

std::uint64_t SampleCounts::count(Symbol symbol) const noexcept {
  auto it = counts_.find(symbol);
  return it == counts_.end() ? 0 : it->second;
}

Profile SampleCounts::profile() const {
  std::vector<std::uint64_t> multiplicities;
  multiplicities.reserve(counts_.size());
  for (const auto& [symbol, count] : counts_) multiplicities.push_back(count);
  return Profile::from_multiplicities(multiplicities);
}

SampleCounts sample_counts(const DiscreteDistribution& p, std::uint64_t n, Rng& rng) {
  Sampler sampler(p);
  SampleCounts counts;
  for (std::uint64_t i = 0; i < n; ++i) counts.add(sampler(rng));
  return counts;
}

namespace {

Profile profile_of_draws(const DiscreteDistribution& p, std::uint64_t n, Rng& rng) {
  Sampler sampler(p);
  if (p.support_size() <= kDenseCountLimit && p.support_size() <= 16 * n + 1024) {
    std::vector<std::uint64_t> counts(p.support_size(), 0);
    for (std::uint64_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(sampler(rng) - p.first_label())];
    return Profile::from_multiplicities(counts);
  }
  std::unordered_map<Symbol, std::uint64_t> counts;
  for (std::uint64_t i = 0; i < n; ++i) ++counts[sampler(rng)];
  std::vector<std::uint64_t> multiplicities;
  multiplicities.reserve(counts.size());
  for (const auto& [s, c] : counts) multiplicities.push_back(c);
  return Profile::from_multiplicities(multiplicities);
}

}  // namespace

Profile sample_profile(const DiscreteDistribution& p, std::uint64_t n, Rng& rng) { return profile_of_draws(p, n, rng); }

Profile sample_profile_poissonized(const DiscreteDistribution& p, std::uint64_t n, Rng& rng) {
  const std::uint64_t length = rng.poisson(static_cast<double>(n));
  return profile_of_draws(p, length, rng);
}

}  // namespace profilekit
