#include "profilekit/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace profilekit {

namespace {

constexpr std::uint64_t kDenseViewLimit = 1'000'000;

__extension__ typedef unsigned __int128 u128;

std::uint64_t saturate(u128 v) {
  return v > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                       : static_cast<std::uint64_t>(v);
}

// C(n, k), saturating.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  u128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays exact since the running value is C(n-k+i, i).
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return saturate(result);
}

}  // namespace

Profile Profile::from_pairs(std::vector<ProfileEntry> pairs) {
  std::map<std::uint64_t, std::uint64_t> merged;
  for (const auto& e : pairs) {
    if (e.multiplicity == 0) throw std::invalid_argument("profile: zero multiplicity");
    if (e.prevalence == 0) throw std::invalid_argument("profile: zero prevalence");
    merged[e.multiplicity] += e.prevalence;
  }
  Profile p;
  p.pairs_.reserve(merged.size());
  u128 n = 0;
  for (const auto& [mu, phi] : merged) {
    p.pairs_.push_back({mu, phi});
    n += static_cast<u128>(mu) * phi;
  }
  if (n > std::numeric_limits<std::uint64_t>::max()) throw std::invalid_argument("profile: length overflow");
  p.length_ = static_cast<std::uint64_t>(n);
  return p;
}

Profile Profile::from_multiplicities(std::span<const std::uint64_t> multiplicities) {
  std::vector<std::uint64_t> sorted;
  sorted.reserve(multiplicities.size());
  for (auto m : multiplicities)
    if (m > 0) sorted.push_back(m);
  std::sort(sorted.begin(), sorted.end());
  Profile p;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    p.pairs_.push_back({sorted[i], static_cast<std::uint64_t>(j - i)});
    p.length_ += sorted[i] * (j - i);
    i = j;
  }
  return p;
}

std::uint64_t Profile::distinct_symbols() const noexcept {
  std::uint64_t total = 0;
  for (const auto& e : pairs_) total += e.prevalence;
  return total;
}

std::uint64_t Profile::prevalence(std::uint64_t multiplicity) const noexcept {
  auto it = std::lower_bound(pairs_.begin(), pairs_.end(), multiplicity,
                             [](const ProfileEntry& e, std::uint64_t mu) { return e.multiplicity < mu; });
  return (it != pairs_.end() && it->multiplicity == multiplicity) ? it->prevalence : 0;
}

std::uint64_t Profile::max_multiplicity() const noexcept {
  return pairs_.empty() ? 0 : pairs_.back().multiplicity;
}

std::uint64_t Profile::sum_squared_multiplicities() const noexcept {
  std::uint64_t total = 0;
  for (const auto& e : pairs_) total += e.multiplicity * e.multiplicity * e.prevalence;
  return total;
}

std::vector<std::uint64_t> Profile::prevalence_vector() const {
  if (length_ > kDenseViewLimit) throw std::length_error("prevalence_vector: n exceeds 10^6");
  std::vector<std::uint64_t> dense(length_ + 1, 0);
  for (const auto& e : pairs_) dense[e.multiplicity] = e.prevalence;
  return dense;
}

std::vector<std::uint64_t> Profile::multiplicities() const {
  std::vector<std::uint64_t> out;
  out.reserve(distinct_symbols());
  for (const auto& e : pairs_) out.insert(out.end(), e.prevalence, e.multiplicity);
  return out;
}

std::size_t dimension(const Profile& profile) noexcept { return profile.dimension(); }

std::uint64_t max_dimension_bound(std::uint64_t n, std::optional<std::uint64_t> alphabet_size) {
  // Largest D with D(D+1)/2 <= n; start from the floating estimate and correct.
  auto d = static_cast<std::uint64_t>((std::sqrt(8.0L * static_cast<long double>(n) + 1.0L) - 1.0L) / 2.0L);
  auto triangular = [](std::uint64_t x) { return static_cast<u128>(x) * (x + 1) / 2; };
  while (d > 0 && triangular(d) > n) --d;
  while (triangular(d + 1) <= n) ++d;
  if (alphabet_size) d = std::min(d, *alphabet_size);
  return d;
}

MultiProfile MultiProfile::from_entries(std::vector<std::uint64_t> lengths,
                                        std::vector<MultiProfileEntry> entries) {
  const std::size_t d = lengths.size();
  if (d == 0) throw std::invalid_argument("multi-profile: arity must be >= 1");
  std::map<std::vector<std::uint64_t>, std::uint64_t> merged;
  std::vector<u128> sums(d, 0);
  for (auto& e : entries) {
    if (e.multiplicity.size() != d) throw std::invalid_argument("multi-profile: wrong vector arity");
    if (e.prevalence == 0) throw std::invalid_argument("multi-profile: zero prevalence");
    if (std::all_of(e.multiplicity.begin(), e.multiplicity.end(), [](auto v) { return v == 0; }))
      throw std::invalid_argument("multi-profile: all-zero multiplicity vector");
    for (std::size_t i = 0; i < d; ++i) sums[i] += static_cast<u128>(e.multiplicity[i]) * e.prevalence;
    merged[std::move(e.multiplicity)] += e.prevalence;
  }
  for (std::size_t i = 0; i < d; ++i)
    if (sums[i] != lengths[i]) throw std::invalid_argument("multi-profile: coordinate sums disagree with lengths");
  MultiProfile mp;
  mp.lengths_ = std::move(lengths);
  mp.entries_.reserve(merged.size());
  for (auto& [vec, phi] : merged) mp.entries_.push_back({vec, phi});
  return mp;
}

Profile MultiProfile::as_profile() const {
  if (arity() != 1) throw std::logic_error("multi-profile: as_profile requires arity 1");
  std::vector<ProfileEntry> pairs;
  pairs.reserve(entries_.size());
  for (const auto& e : entries_) pairs.push_back({e.multiplicity[0], e.prevalence});
  return Profile::from_pairs(std::move(pairs));
}

MultiDimensionBound multi_dimension_bound(std::span<const std::uint64_t> lengths) {
  const std::uint64_t d = lengths.size();
  if (d == 0) throw std::invalid_argument("multi_dimension_bound: d must be >= 1");
  u128 total = 0;
  for (auto n : lengths) total += n;
  const std::uint64_t n_sum = saturate(total);
  // The requirement d * C(d+r-1, d+1) is nondecreasing in r and zero at r = 1.
  auto required = [d](std::uint64_t r) { return saturate(static_cast<u128>(d) * binomial(d + r - 1, d + 1)); };
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  auto fits = [&](std::uint64_t r) { return required(r) <= n_sum && required(r) != kMax; };
  std::uint64_t lo = 1, hi = 2;
  while (fits(hi)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (fits(mid) ? lo : hi) = mid;
  }
  const std::uint64_t r = lo;
  const std::uint64_t c = binomial(d + r, d);
  return {r, c == std::numeric_limits<std::uint64_t>::max() ? c : c - 1};
}

}  // namespace profilekit
