#include "profilekit/codec.hpp"

#include <bit>
#include <string>

namespace profilekit {

namespace {

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t varint() {
    std::uint64_t value = 0;
    for (unsigned shift = 0;; shift += 7) {
      if (pos_ >= bytes_.size()) throw DecodeError(DecodeErrc::truncated_varint, pos_);
      const std::uint8_t b = bytes_[pos_++];
      if (shift == 63 && (b & 0x7E) != 0) throw DecodeError(DecodeErrc::varint_overflow, pos_ - 1);
      value |= static_cast<std::uint64_t>(b & 0x7F) << shift;
      if ((b & 0x80) == 0) return value;
      if (shift == 63) throw DecodeError(DecodeErrc::varint_overflow, pos_ - 1);
    }
  }

  std::size_t pos() const noexcept { return pos_; }
  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 5;
};

}  // namespace

std::string_view to_string(DecodeErrc code) noexcept {
  switch (code) {
    case DecodeErrc::empty_input: return "empty input";
    case DecodeErrc::bad_magic: return "bad magic";
    case DecodeErrc::unsupported_version: return "unsupported version";
    case DecodeErrc::truncated_varint: return "truncated varint";
    case DecodeErrc::varint_overflow: return "varint overflow";
    case DecodeErrc::non_increasing_multiplicity: return "non-increasing multiplicity";
    case DecodeErrc::zero_prevalence: return "zero prevalence";
    case DecodeErrc::length_mismatch: return "declared length does not match sum of multiplicity * prevalence";
    case DecodeErrc::dimension_exceeds_bound: return "dimension exceeds bound for declared length";
    case DecodeErrc::trailing_bytes: return "trailing bytes";
  }
  return "unknown";
}

DecodeError::DecodeError(DecodeErrc code, std::size_t offset)
    : std::runtime_error("PRFL decode error at byte " + std::to_string(offset) + ": " + std::string(to_string(code))),
      code_(code),
      offset_(offset) {}

std::size_t varint_size(std::uint64_t v) noexcept {
  const int bits = v == 0 ? 1 : std::bit_width(v);
  return static_cast<std::size_t>((bits + 6) / 7);
}

EncodedProfile encode_block(const Profile& profile) {
  EncodedProfile out;
  out.bytes.reserve(encoded_size_bits(profile) / 8);
  out.bytes.assign(std::begin(kPrflMagic), std::end(kPrflMagic));
  out.bytes.push_back(kPrflVersion);
  put_varint(out.bytes, profile.length());
  put_varint(out.bytes, profile.dimension());
  std::uint64_t previous = 0;
  for (const auto& e : profile.pairs()) {
    put_varint(out.bytes, e.multiplicity - previous);
    put_varint(out.bytes, e.prevalence);
    previous = e.multiplicity;
  }
  return out;
}

Profile decode_block(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw DecodeError(DecodeErrc::empty_input, 0);
  for (std::size_t i = 0; i < 4; ++i) {
    if (i >= bytes.size() || bytes[i] != kPrflMagic[i]) throw DecodeError(DecodeErrc::bad_magic, i);
  }
  if (bytes.size() < 5) throw DecodeError(DecodeErrc::truncated_varint, 5);
  if (bytes[4] != kPrflVersion) throw DecodeError(DecodeErrc::unsupported_version, 4);

  Reader in(bytes);
  const std::uint64_t n = in.varint();
  const std::size_t d_offset = in.pos();
  const std::uint64_t d = in.varint();
  if (d > max_dimension_bound(n)) throw DecodeError(DecodeErrc::dimension_exceeds_bound, d_offset);

  std::vector<ProfileEntry> pairs;
  pairs.reserve(static_cast<std::size_t>(d));
  std::uint64_t multiplicity = 0;
  std::uint64_t total = 0;
  for (std::uint64_t i = 0; i < d; ++i) {
    const std::size_t at = in.pos();
    const std::uint64_t delta = in.varint();
    if (delta == 0 || delta > n - multiplicity) throw DecodeError(DecodeErrc::non_increasing_multiplicity, at);
    multiplicity += delta;
    const std::size_t prev_at = in.pos();
    const std::uint64_t prevalence = in.varint();
    if (prevalence == 0) throw DecodeError(DecodeErrc::zero_prevalence, prev_at);
    if (prevalence > (n - total) / multiplicity) throw DecodeError(DecodeErrc::length_mismatch, prev_at);
    total += multiplicity * prevalence;
    pairs.push_back({multiplicity, prevalence});
  }
  if (total != n) throw DecodeError(DecodeErrc::length_mismatch, in.pos());
  if (!in.done()) throw DecodeError(DecodeErrc::trailing_bytes, in.pos());
  return Profile::from_pairs(std::move(pairs));
}

std::uint64_t encoded_size_bits(const Profile& profile) noexcept {
  std::uint64_t bytes = 5 + varint_size(profile.length()) + varint_size(profile.dimension());
  std::uint64_t previous = 0;
  for (const auto& e : profile.pairs()) {
    bytes += varint_size(e.multiplicity - previous) + varint_size(e.prevalence);
    previous = e.multiplicity;
  }
  return 8 * bytes;
}

std::uint64_t encoded_size_budget_bits(const Profile& profile) noexcept {
  const auto width = static_cast<std::uint64_t>(std::bit_width(profile.length()));  // ceil(log2(n + 1))
  return 2 * profile.dimension() * width + 128;
}

void SequentialProfileEncoder::update(std::uint64_t mu) {
  if (mu == 0) {
    auto first = tree_.begin();
    if (first != tree_.end() && first->first == 1) {
      ++first->second;
    } else {
      insert_one(first, 1);
    }
  } else {
    auto it = tree_.find(mu);
    if (it == tree_.end()) {
      throw std::invalid_argument("SequentialProfileEncoder: multiplicity " + std::to_string(mu) + " not in tree");
    }
    auto next = std::next(it);
    const bool successor = next != tree_.end() && next->first == mu + 1;
    if (it->second > 1) {
      --it->second;
      if (successor) {
        ++next->second;
      } else {
        insert_one(next, mu + 1);
      }
    } else if (successor) {
      ++next->second;
      erase_node(it);
    } else {
      // Reuse the node: (mu, 1) becomes (mu + 1, 1) in the same position.
      auto node = tree_.extract(it);
      node.key() = mu + 1;
      tree_.insert(next, std::move(node));
    }
  }
  ++consumed_;
  if ((dimension_bound_ + 1) * (dimension_bound_ + 2) / 2 <= consumed_) ++dimension_bound_;
  if (tree_.size() > dimension_bound_) {
    throw std::logic_error("SequentialProfileEncoder: tree exceeds the dimension bound");
  }
}

void SequentialProfileEncoder::insert_one(std::map<std::uint64_t, std::uint64_t>::const_iterator hint,
                                          std::uint64_t mu) {
  if (spare_.empty()) {
    tree_.emplace_hint(hint, mu, 1);
    return;
  }
  spare_.key() = mu;
  spare_.mapped() = 1;
  tree_.insert(hint, std::move(spare_));
  spare_ = {};
}

void SequentialProfileEncoder::erase_node(std::map<std::uint64_t, std::uint64_t>::iterator it) {
  if (spare_.empty()) {
    spare_ = tree_.extract(it);
  } else {
    tree_.erase(it);
  }
}

Profile SequentialProfileEncoder::finalize() const {
  std::vector<ProfileEntry> pairs;
  pairs.reserve(tree_.size());
  for (const auto& [mu, phi] : tree_) pairs.push_back({mu, phi});
  return Profile::from_pairs(std::move(pairs));
}

}  // namespace profilekit
