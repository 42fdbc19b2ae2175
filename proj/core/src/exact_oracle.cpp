#include "profilekit/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace profilekit {

namespace {

// Neumaier compensated summation.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

// C(n, r) saturating at `cap + 1`.
std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t r, std::uint64_t cap) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  __extension__ typedef unsigned __int128 u128;
  u128 acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    acc = acc * (n - r + i) / i;
    if (acc > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(acc);
}

std::vector<double> positive_probabilities(const DiscreteDistribution& p) {
  std::vector<double> probs;
  for (const auto& run : p.runs()) {
    if (run.probability <= 0.0) continue;
    if (probs.size() + run.count > 10'000'000) throw std::length_error("positive support too large for enumeration");
    probs.insert(probs.end(), run.count, run.probability);
  }
  return probs;
}

}  // namespace

double ProfileDistribution::total() const {
  CompensatedSum s;
  for (const auto& [profile, prob] : entries) s.add(prob);
  return s.value();
}

ProfileDistribution profile_distribution_exact(const DiscreteDistribution& p, std::uint64_t n,
                                               std::uint64_t max_states) {
  const std::vector<double> probs = positive_probabilities(p);
  const std::uint64_t k = probs.size();
  if (k == 0) throw std::invalid_argument("profile_distribution_exact: distribution has no positive mass");
  const std::uint64_t states = binomial_capped(n + k - 1, k - 1, max_states);
  if (states > max_states) {
    throw std::length_error("profile_distribution_exact: C(n+k-1, k-1) exceeds the enumeration guard of " +
                            std::to_string(max_states));
  }

  std::vector<double> log_p(k);
  for (std::size_t i = 0; i < k; ++i) log_p[i] = std::log(probs[i]);
  std::vector<double> log_factorial(n + 1);
  for (std::uint64_t i = 0; i <= n; ++i) log_factorial[i] = std::lgamma(static_cast<double>(i) + 1.0);

  std::map<Profile, CompensatedSum> acc;
  std::vector<std::uint64_t> counts(k, 0);
  const double base = log_factorial[n];

  std::function<void(std::size_t, std::uint64_t, double)> recurse = [&](std::size_t idx, std::uint64_t left,
                                                                        double log_weight) {
    if (idx + 1 == k) {
      counts[idx] = left;
      const double lw = log_weight - log_factorial[left] + static_cast<double>(left) * log_p[idx];
      acc[Profile::from_multiplicities(counts)].add(std::exp(base + lw));
      return;
    }
    for (std::uint64_t c = 0; c <= left; ++c) {
      counts[idx] = c;
      recurse(idx + 1, left - c, log_weight - log_factorial[c] + static_cast<double>(c) * log_p[idx]);
    }
  };
  recurse(0, n, 0.0);

  ProfileDistribution out;
  out.n = n;
  out.k = k;
  for (auto& [profile, sum] : acc) out.entries.emplace_hint(out.entries.end(), profile, sum.value());
  return out;
}

double profile_entropy_exact(const ProfileDistribution& dist) {
  CompensatedSum s;
  for (const auto& [profile, prob] : dist.entries) {
    if (prob > 0.0) s.add(-prob * std::log(prob));
  }
  return s.value();
}

double profile_entropy_exact(const DiscreteDistribution& p, std::uint64_t n) {
  return profile_entropy_exact(profile_distribution_exact(p, n));
}

DimensionMoments dimension_moments_exact(const ProfileDistribution& dist) {
  CompensatedSum mean;
  for (const auto& [profile, prob] : dist.entries) mean.add(prob * static_cast<double>(profile.dimension()));
  const double mu = mean.value();
  CompensatedSum var;
  for (const auto& [profile, prob] : dist.entries) {
    const double d = static_cast<double>(profile.dimension()) - mu;
    var.add(prob * d * d);
  }
  return {mu, var.value()};
}

DimensionMoments dimension_moments_exact(const DiscreteDistribution& p, std::uint64_t n) {
  return dimension_moments_exact(profile_distribution_exact(p, n));
}

std::uint64_t typical_cardinality(const ProfileDistribution& dist, double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("typical_cardinality: delta must lie in [0, 1)");
  std::vector<double> probs;
  probs.reserve(dist.entries.size());
  for (const auto& [profile, prob] : dist.entries) {
    if (prob > 0.0) probs.push_back(prob);
  }
  if (delta == 0.0) return probs.size();
  std::sort(probs.begin(), probs.end(), std::greater<>());
  const double target = 1.0 - delta - 1e-12;
  CompensatedSum s;
  std::uint64_t used = 0;
  for (double q : probs) {
    if (s.value() >= target) break;
    s.add(q);
    ++used;
  }
  return used;
}

std::uint64_t typical_cardinality(const DiscreteDistribution& p, std::uint64_t n, double delta) {
  return typical_cardinality(profile_distribution_exact(p, n), delta);
}

std::vector<BigInt> partition_counts(std::uint32_t n_max) {
  if (n_max > 10'000) throw std::invalid_argument("partition_counts: n_max must be <= 10000");
  std::vector<BigInt> p(n_max + 1);
  p[0] = 1;
  for (std::uint32_t m = 1; m <= n_max; ++m) {
    BigInt total = 0;
    for (std::int64_t j = 1;; ++j) {
      const std::int64_t g1 = j * (3 * j - 1) / 2;
      if (g1 > m) break;
      const bool plus = (j % 2) == 1;
      const std::int64_t g2 = j * (3 * j + 1) / 2;
      if (plus) {
        total += p[m - g1];
        if (g2 <= m) total += p[m - g2];
      } else {
        total -= p[m - g1];
        if (g2 <= m) total -= p[m - g2];
      }
    }
    p[m] = total;
  }
  return p;
}

BigInt partition_count(std::uint32_t n) { return partition_counts(n).back(); }

double log_big(const BigInt& value) {
  if (value <= 0) throw std::domain_error("log_big: value must be positive");
  const auto bits = static_cast<std::int64_t>(boost::multiprecision::msb(value));
  if (bits < 60) return std::log(value.convert_to<double>());
  const std::int64_t shift = bits - 60;
  const BigInt top = value >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

double profile_probability(const DiscreteDistribution& p, const Profile& profile) {
  const ProfileDistribution dist = profile_distribution_exact(p, profile.length());
  auto it = dist.entries.find(profile);
  return it == dist.entries.end() ? 0.0 : it->second;
}

double profile_probability_direct(std::span<const double> probs, const Profile& profile) {
  std::vector<double> support;
  for (double q : probs) {
    if (q < 0.0) throw std::invalid_argument("profile_probability_direct: negative probability");
    support.push_back(q);
  }
  const std::uint64_t k = support.size();
  const std::uint64_t distinct = profile.distinct_symbols();
  if (distinct > k) return 0.0;
  if (profile.empty()) return 1.0;

  // Classes: each profile multiplicity, plus multiplicity zero for the rest.
  std::vector<std::uint64_t> mult;
  std::vector<std::uint64_t> radix;
  for (const auto& e : profile.pairs()) {
    mult.push_back(e.multiplicity);
    radix.push_back(e.prevalence + 1);
  }
  mult.push_back(0);
  radix.push_back(k - distinct + 1);
  std::uint64_t states = 1;
  for (auto r : radix) {
    states *= r;
    if (states > 50'000'000) throw std::length_error("profile_probability_direct: state space too large");
  }
  std::vector<std::uint64_t> stride(radix.size());
  std::uint64_t s = 1;
  for (std::size_t c = 0; c < radix.size(); ++c) {
    stride[c] = s;
    s *= radix[c];
  }

  // dp[state] = sum over assignments of the symbols processed so far; a state
  // records how many symbols each class has already received.
  std::vector<double> dp(states, 0.0), next(states, 0.0);
  dp[0] = 1.0;
  std::vector<double> powers(mult.size());
  for (std::uint64_t x = 0; x < k; ++x) {
    for (std::size_t c = 0; c < mult.size(); ++c) powers[c] = std::pow(support[x], static_cast<double>(mult[c]));
    std::fill(next.begin(), next.end(), 0.0);
    for (std::uint64_t st = 0; st < states; ++st) {
      if (dp[st] == 0.0) continue;
      for (std::size_t c = 0; c < mult.size(); ++c) {
        const std::uint64_t used = (st / stride[c]) % radix[c];
        if (used + 1 < radix[c]) next[st + stride[c]] += dp[st] * powers[c];
      }
    }
    dp.swap(next);
  }
  double log_coeff = std::lgamma(static_cast<double>(profile.length()) + 1.0);
  for (const auto& e : profile.pairs()) {
    log_coeff -= static_cast<double>(e.prevalence) * std::lgamma(static_cast<double>(e.multiplicity) + 1.0);
  }
  return std::exp(log_coeff) * dp[states - 1];
}

PmlResult pml_brute(const Profile& profile, std::uint64_t support_cap, std::uint64_t grid_cells) {
  if (profile.length() > 10) throw std::invalid_argument("pml_brute: profile length must be <= 10");
  if (support_cap == 0 || support_cap > 8) throw std::invalid_argument("pml_brute: support cap must lie in [1, 8]");
  if (grid_cells == 0 || grid_cells > 400) throw std::invalid_argument("pml_brute: grid cells must lie in [1, 400]");
  if (profile.distinct_symbols() > support_cap) {
    throw std::invalid_argument("pml_brute: profile has more distinct symbols than the support cap");
  }

  constexpr std::uint64_t kMaxCandidates = 10'000'000;
  PmlResult best;
  best.likelihood = -1.0;
  const double g = static_cast<double>(grid_cells);
  std::vector<std::uint64_t> parts;
  std::vector<double> probs;

  // Parts are generated in non-increasing order; for a fixed support size the
  // recursion visits vectors in lexicographically increasing order.
  std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)> recurse = [&](std::uint64_t left,
                                                                                 std::uint64_t slots,
                                                                                 std::uint64_t max_part) {
    if (slots == 0) {
      if (left != 0) return;
      if (++best.candidates > kMaxCandidates) throw std::length_error("pml_brute: candidate count exceeds guard");
      probs.resize(parts.size());
      for (std::size_t i = 0; i < parts.size(); ++i) probs[i] = static_cast<double>(parts[i]) / g;
      const double like = profile_probability_direct(probs, profile);
      if (like > best.likelihood * (1.0 + 1e-12) + 1e-300) {
        best.likelihood = like;
        best.probabilities = probs;
      }
      return;
    }
    // Each remaining slot needs at least one cell.
    const std::uint64_t lo = (left + slots - 1) / slots;
    const std::uint64_t hi = std::min(max_part, left - (slots - 1));
    for (std::uint64_t part = lo; part <= hi; ++part) {
      parts.push_back(part);
      recurse(left - part, slots - 1, part);
      parts.pop_back();
    }
  };
  for (std::uint64_t size = 1; size <= std::min(support_cap, grid_cells); ++size) recurse(grid_cells, size, grid_cells);
  return best;
}

}  // namespace profilekit
