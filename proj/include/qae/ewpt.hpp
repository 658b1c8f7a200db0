#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qae/model.hpp"
#include "qae/optimizer.hpp"

namespace qae {

struct PathNode {
  KeyId key = 0;
  std::vector<std::uint32_t> children;  // insertion order
  std::vector<std::string> rule_ids;

  bool is_leaf() const noexcept { return !rule_ids.empty(); }
};

enum class PathFailure { none, no_path, incomplete_path };

struct MatchResult {
  bool matched = false;
  std::uint64_t comparisons = 0;
  PathFailure failure = PathFailure::none;
};

/// Entropy-weighted path tree. Each rule is stored as the path of its
/// constraints ordered by the build-time weight list.
///
/// Comparisons are counted as key equality tests under a linear scan of a
/// node's children in insertion order; a hit at position p costs p + 1, a
/// miss costs the number of children.
class Ewpt {
 public:
  static constexpr std::uint32_t kRoot = 0;

  Ewpt();

  const PathNode& node(std::uint32_t i) const { return nodes_.at(i); }
  const PathNode& root() const { return nodes_.front(); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t leaf_count() const noexcept;
  std::uint64_t weight_version() const noexcept { return weight_version_; }
  const std::vector<std::size_t>& ranks() const noexcept { return ranks_; }

  /// Child of `parent` with `key`; adds the scan cost to `comparisons`.
  std::optional<std::uint32_t> find_child(std::uint32_t parent, KeyId key,
                                          std::uint64_t& comparisons) const;

  /// Indented rendering, one node per line as "attr=value" with "*" on
  /// leaves; used to compare tree shapes.
  std::string render(const AttributeSpace& space) const;

 private:
  friend Ewpt build_tree(std::span<const PolicyRule>, const WeightList&, const AttributeSpace&);

  std::vector<PathNode> nodes_;
  std::uint64_t weight_version_ = 0;
  std::vector<std::size_t> ranks_;  // by attribute-space index
};

/// Rules are inserted in ascending id order. Throws Errc::unknown_attribute
/// when a rule constrains an attribute missing from the weight list.
Ewpt build_tree(std::span<const PolicyRule> policies, const WeightList& weights,
                const AttributeSpace& space);

/// Orders pairs by rank (heaviest first); ties cannot occur since ranks are
/// a total order.
std::vector<KeyId> sort_keys(std::vector<KeyId> keys, const std::vector<std::size_t>& ranks);

/// Credential, object, operation and environment pairs of `req`, sorted by
/// the weight list. Throws Errc::unknown_object when the object is missing.
std::vector<AVPair> sort_request_attributes(const AccessRequest& req, const Registry& registry,
                                            const WeightList& weights);

/// Every element of `seq` must be consumed along one root path ending at a
/// leaf.
MatchResult match_strict(const Ewpt& tree, std::span<const KeyId> seq);

/// Elements of `seq` may be skipped; succeeds when a leaf is reached whose
/// path is a subsequence of `seq`.
MatchResult match_subset(const Ewpt& tree, std::span<const KeyId> seq);

enum class ScanSemantics { exact, subset };

/// Reference matcher over the flat rule set.
bool linear_scan(std::span<const PolicyRule> policies, const std::vector<AVPair>& req_pairs,
                 ScanSemantics semantics);

/// Linear scan that also reports comparisons: one per constraint lookup.
MatchResult linear_scan_counted(std::span<const PolicyRule> policies,
                                const std::vector<AVPair>& sorted_req_pairs,
                                ScanSemantics semantics);

}  // namespace qae
