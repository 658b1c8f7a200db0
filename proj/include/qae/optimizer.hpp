#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <string_view>
#include <vector>

#include "qae/model.hpp"

namespace qae {

struct DecisionRecord {
  std::vector<AVPair> pairs;  // sorted by (attr, value)
  Outcome outcome = Outcome::deny;
  std::uint64_t seq = 0;
};

/// Bounded FIFO of recent decisions (access-authorization history).
class AAHPool {
 public:
  static constexpr std::size_t kDefaultCapacity = 10'000;

  explicit AAHPool(std::size_t capacity = kDefaultCapacity);

  void record(DecisionRecord rec);

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return records_.size(); }
  const std::deque<DecisionRecord>& records() const noexcept { return records_; }
  std::size_t grants() const noexcept { return grants_; }

 private:
  std::size_t capacity_;
  std::deque<DecisionRecord> records_;
  std::uint64_t last_seq_ = 0;
  std::size_t grants_ = 0;
};

double decision_entropy(const AAHPool& pool);

/// I(D, attr) = H(D) - H(D|attr). A record without the attribute falls in
/// its own "absent" partition.
double information_gain(const AAHPool& pool, std::string_view attr);

/// log2(r_a) / log2(N), r_a being the smallest value-cohort of `attr` in the
/// subject matrix (N when the attribute is never assigned).
double attribute_anonymity(const Registry& registry, std::string_view attr);

enum class AnonymityTerm {
  normalized,    // per-attribute log-ratio in [0, 1]
  raw_global_r,  // r from (r,1)-anonymity, identical for every attribute
};

struct WeightEntry {
  std::string attr;
  double info_gain = 0.0;
  double anonymity = 0.0;
  double weight = 0.0;

  bool operator==(const WeightEntry&) const = default;
};

/// Attributes ordered by descending weight, ties by ascending name.
class WeightList {
 public:
  WeightList() = default;
  WeightList(std::vector<WeightEntry> entries, std::uint64_t version);

  /// Ordering from the attribute space's initial weights.
  static WeightList initial(const AttributeSpace& space);

  const std::vector<WeightEntry>& entries() const noexcept { return entries_; }
  std::uint64_t version() const noexcept { return version_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Position of `attr`, 0 = heaviest.
  std::optional<std::size_t> rank_of(std::string_view attr) const;

  /// Rank table indexed by attribute-space index; unknown attributes get
  /// SIZE_MAX.
  std::vector<std::size_t> ranks_for(const AttributeSpace& space) const;

  /// True when both lists order the same attributes identically.
  bool same_order(const WeightList& o) const;

 private:
  std::vector<WeightEntry> entries_;
  std::uint64_t version_ = 0;
};

WeightList compute_weights(const AttributeSpace& space, const AAHPool& pool,
                           const Registry& registry,
                           AnonymityTerm term = AnonymityTerm::normalized,
                           std::uint64_t version = 0);

std::string weights_csv(const WeightList& w);

}  // namespace qae
