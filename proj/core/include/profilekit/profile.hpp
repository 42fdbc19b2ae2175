#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace profilekit {

/// Opaque symbol token used by samplers and distributions.
using Symbol = std::int64_t;

struct ProfileEntry {
  std::uint64_t multiplicity = 0;
  std::uint64_t prevalence = 0;

  friend auto operator<=>(const ProfileEntry&, const ProfileEntry&) = default;
};

/// Multiset of symbol multiplicities of a sequence, stored sparsely as
/// (multiplicity, prevalence) pairs sorted by multiplicity.
///
/// Invariants: multiplicities strictly increasing, prevalences >= 1, and
/// sum of multiplicity * prevalence equals length().
class Profile {
 public:
  Profile() = default;

  /// Builds a profile from pairs in any order. Duplicate multiplicities are
  /// merged. Throws std::invalid_argument on zero multiplicity or prevalence.
  static Profile from_pairs(std::vector<ProfileEntry> pairs);

  /// Builds a profile from a multiset of per-symbol multiplicities; zeros are
  /// ignored (unseen symbols are not part of a profile).
  static Profile from_multiplicities(std::span<const std::uint64_t> multiplicities);

  std::span<const ProfileEntry> pairs() const noexcept { return pairs_; }
  std::uint64_t length() const noexcept { return length_; }
  std::size_t dimension() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }

  /// Number of distinct observed symbols, i.e. the sum of prevalences.
  std::uint64_t distinct_symbols() const noexcept;
  std::uint64_t prevalence(std::uint64_t multiplicity) const noexcept;
  std::uint64_t max_multiplicity() const noexcept;

  /// Sum over symbols of multiplicity^2.
  std::uint64_t sum_squared_multiplicities() const noexcept;

  /// Dense view: entry mu holds the prevalence of mu, for mu in [0, n].
  /// Only available for n <= 10^6.
  std::vector<std::uint64_t> prevalence_vector() const;

  /// Expanded multiset of multiplicities in ascending order.
  std::vector<std::uint64_t> multiplicities() const;

  friend bool operator==(const Profile&, const Profile&) = default;
  friend auto operator<=>(const Profile& a, const Profile& b) {
    if (auto c = a.length_ <=> b.length_; c != 0) return c;
    return a.pairs_ <=> b.pairs_;
  }

 private:
  std::vector<ProfileEntry> pairs_;
  std::uint64_t length_ = 0;
};

std::size_t dimension(const Profile& profile) noexcept;

/// min{floor((sqrt(8n+1)-1)/2), alphabet_size}: the largest D with 1+2+...+D <= n,
/// optionally capped by the alphabet size.
std::uint64_t max_dimension_bound(std::uint64_t n,
                                  std::optional<std::uint64_t> alphabet_size = std::nullopt);

/// Profile of any sequence of hashable symbols.
template <class Range>
Profile profile_of(const Range& sequence) {
  using Value = std::remove_cvref_t<decltype(*std::begin(sequence))>;
  std::unordered_map<Value, std::uint64_t> counts;
  for (const auto& symbol : sequence) ++counts[symbol];
  std::vector<std::uint64_t> multiplicities;
  multiplicities.reserve(counts.size());
  for (const auto& [symbol, count] : counts) multiplicities.push_back(count);
  return Profile::from_multiplicities(multiplicities);
}

// --- Multi-sequence profiles -------------------------------------------------

struct MultiProfileEntry {
  std::vector<std::uint64_t> multiplicity;
  std::uint64_t prevalence = 0;

  friend auto operator<=>(const MultiProfileEntry&, const MultiProfileEntry&) = default;
};

/// Profile of a tuple of d sequences: the multiset of per-symbol frequency
/// vectors over the union of observed symbols.
class MultiProfile {
 public:
  MultiProfile() = default;

  /// Throws std::invalid_argument if a vector has the wrong arity, is all
  /// zero, or the coordinate sums disagree with `lengths`.
  static MultiProfile from_entries(std::vector<std::uint64_t> lengths,
                                   std::vector<MultiProfileEntry> entries);

  std::size_t arity() const noexcept { return lengths_.size(); }
  std::span<const std::uint64_t> lengths() const noexcept { return lengths_; }
  std::span<const MultiProfileEntry> entries() const noexcept { return entries_; }
  std::size_t dimension() const noexcept { return entries_.size(); }

  /// The d = 1 collapse. Throws std::logic_error when arity() != 1.
  Profile as_profile() const;

  friend bool operator==(const MultiProfile&, const MultiProfile&) = default;

 private:
  std::vector<std::uint64_t> lengths_;
  std::vector<MultiProfileEntry> entries_;
};

template <class Sequence>
MultiProfile multi_profile_of(std::span<const Sequence> sequences) {
  using Value = std::remove_cvref_t<decltype(*std::begin(sequences.front()))>;
  const std::size_t d = sequences.size();
  std::unordered_map<Value, std::vector<std::uint64_t>> counts;
  std::vector<std::uint64_t> lengths(d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    for (const auto& symbol : sequences[i]) {
      auto& vec = counts[symbol];
      if (vec.empty()) vec.assign(d, 0);
      ++vec[i];
      ++lengths[i];
    }
  }
  std::vector<MultiProfileEntry> entries;
  entries.reserve(counts.size());
  for (auto& [symbol, vec] : counts) entries.push_back({std::move(vec), 1});
  return MultiProfile::from_entries(std::move(lengths), std::move(entries));
}

struct MultiDimensionBound {
  std::uint64_t r = 0;
  std::uint64_t bound = 0;
};

/// Largest r >= 1 with sum(lengths) >= d * C(d+r-1, d+1), and the resulting
/// dimension bound C(d+r, d) - 1. Binomials saturate at UINT64_MAX.
MultiDimensionBound multi_dimension_bound(std::span<const std::uint64_t> lengths);

}  // namespace profilekit
