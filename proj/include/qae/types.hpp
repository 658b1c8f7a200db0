#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qae {

enum class AttrClass { subject, object, environment, operation };

const char* to_string(AttrClass c) noexcept;
AttrClass parse_attr_class(std::string_view s);

struct AVPair {
  std::string attr;
  std::string value;

  auto operator<=>(const AVPair&) const = default;
};

/// A set of attribute-value pairs. Stored sorted by (attr, value) with exact
/// duplicates removed, so equality is set equality.
class Credential {
 public:
  Credential() = default;
  explicit Credential(std::vector<AVPair> pairs);

  const std::vector<AVPair>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }

  /// True if every pair of this credential appears in `other`.
  bool subset_of(const std::vector<AVPair>& sorted_other) const;

  /// Length-prefixed lookup key; unlike the signing encoding it accepts any
  /// bytes in names and values.
  std::string key() const;

  bool operator==(const Credential&) const = default;

 private:
  std::vector<AVPair> pairs_;
};

struct AttributeDef {
  std::string name;
  AttrClass cls = AttrClass::subject;
  double initial_weight = 0.0;
  std::vector<std::string> domain;
};

// Packed (attribute index, value index) used by the tree and the matrix.
using KeyId = std::uint64_t;

inline constexpr KeyId make_key(std::uint32_t attr, std::uint32_t value) noexcept {
  return (static_cast<KeyId>(attr) << 32) | value;
}
inline constexpr std::uint32_t key_attr(KeyId k) noexcept {
  return static_cast<std::uint32_t>(k >> 32);
}
inline constexpr std::uint32_t key_value(KeyId k) noexcept {
  return static_cast<std::uint32_t>(k & 0xffffffffu);
}

class AttributeSpace {
 public:
  void add(AttributeDef def);

  std::size_t size() const noexcept { return defs_.size(); }
  const AttributeDef& at(std::size_t i) const { return defs_.at(i); }
  const std::vector<AttributeDef>& defs() const noexcept { return defs_; }

  std::optional<std::uint32_t> index_of(std::string_view name) const;
  const AttributeDef* find(std::string_view name) const;
  std::optional<std::uint32_t> value_index(std::uint32_t attr,
                                           std::string_view value) const;

  /// Throws unknown_attribute / out_of_domain.
  KeyId key(const AVPair& p) const;
  AVPair pair(KeyId k) const;

  std::vector<std::uint32_t> of_class(AttrClass c) const;

  bool operator==(const AttributeSpace& o) const { return defs_ == o.defs_; }

 private:
  std::vector<AttributeDef> defs_;
  std::unordered_map<std::string, std::uint32_t> by_name_;
  std::vector<std::unordered_map<std::string, std::uint32_t>> values_;
};

bool operator==(const AttributeDef& a, const AttributeDef& b);

/// Sorts pairs by (attr, value) and rejects two pairs on the same attribute.
std::vector<AVPair> normalize_pairs(std::vector<AVPair> pairs);

}  // namespace qae
