#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "profilekit/profile.hpp"

namespace profilekit {

// PRFL v1 layout: "PRFL" magic, version byte 0x01, then unsigned LEB128
// varints n, D and D pairs (multiplicity delta from the previous entry,
// starting at 0; prevalence).

inline constexpr std::uint8_t kPrflMagic[4] = {0x50, 0x52, 0x46, 0x4C};
inline constexpr std::uint8_t kPrflVersion = 0x01;

struct EncodedProfile {
  std::vector<std::uint8_t> bytes;

  std::uint64_t size_bits() const noexcept { return 8 * static_cast<std::uint64_t>(bytes.size()); }
  friend bool operator==(const EncodedProfile&, const EncodedProfile&) = default;
};

enum class DecodeErrc {
  empty_input,
  bad_magic,
  unsupported_version,
  truncated_varint,
  varint_overflow,
  non_increasing_multiplicity,
  zero_prevalence,
  length_mismatch,
  dimension_exceeds_bound,
  trailing_bytes,
};

std::string_view to_string(DecodeErrc code) noexcept;

class DecodeError : public std::runtime_error {
 public:
  DecodeError(DecodeErrc code, std::size_t offset);

  DecodeErrc code() const noexcept { return code_; }
  /// Byte offset at which decoding stopped.
  std::size_t offset() const noexcept { return offset_; }

 private:
  DecodeErrc code_;
  std::size_t offset_;
};

EncodedProfile encode_block(const Profile& profile);

/// Throws DecodeError.
Profile decode_block(std::span<const std::uint8_t> bytes);

/// Exact size in bits of encode_block(profile), computed without encoding.
std::uint64_t encoded_size_bits(const Profile& profile) noexcept;

/// 2 * D * ceil(log2(n + 1)) + 128: the size budget every stream must meet.
std::uint64_t encoded_size_budget_bits(const Profile& profile) noexcept;

/// Number of bytes in the LEB128 encoding of v.
std::size_t varint_size(std::uint64_t v) noexcept;

/// Maintains the profile of the consumed prefix in an ordered
/// map multiplicity -> prevalence, fed with each incoming symbol's prior
/// multiplicity.
class SequentialProfileEncoder {
 public:
  /// Throws std::invalid_argument when mu > 0 is not present in the tree.
  void update(std::uint64_t mu);

  const std::map<std::uint64_t, std::uint64_t>& tree() const noexcept { return tree_; }
  std::uint64_t consumed() const noexcept { return consumed_; }

  Profile finalize() const;
  EncodedProfile finalize_encoded() const { return encode_block(finalize()); }

 private:
  std::map<std::uint64_t, std::uint64_t> tree_;
  std::uint64_t consumed_ = 0;
  std::uint64_t dimension_bound_ = 0;  // largest D with D(D+1)/2 <= consumed_
  std::map<std::uint64_t, std::uint64_t>::node_type spare_;

  void insert_one(std::map<std::uint64_t, std::uint64_t>::const_iterator hint, std::uint64_t mu);
  void erase_node(std::map<std::uint64_t, std::uint64_t>::iterator it);
};

/// Symbol-level front end: tracks per-symbol counts and forwards prior
/// multiplicities to a SequentialProfileEncoder.
template <class Sym, class Hash = std::hash<Sym>>
class SymbolStreamEncoder {
 public:
  void feed(const Sym& symbol) {
    std::uint64_t& count = counts_[symbol];
    encoder_.update(count);
    ++count;
  }

  template <class Range>
  void feed_all(const Range& symbols) {
    for (const auto& s : symbols) feed(s);
  }

  const SequentialProfileEncoder& encoder() const noexcept { return encoder_; }
  std::uint64_t multiplicity(const Sym& symbol) const {
    auto it = counts_.find(symbol);
    return it == counts_.end() ? 0 : it->second;
  }
  Profile finalize() const { return encoder_.finalize(); }

 private:
  std::unordered_map<Sym, std::uint64_t, Hash> counts_;
  SequentialProfileEncoder encoder_;
};

}  // namespace profilekit
