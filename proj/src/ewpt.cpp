#include "qae/ewpt.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "qae/error.hpp"

namespace qae {

Ewpt::Ewpt() : nodes_(1) {}

std::size_t Ewpt::leaf_count() const noexcept {
  std::size_t n = 0;
  for (const auto& node : nodes_) n += node.rule_ids.size();
  return n;
}

std::optional<std::uint32_t> Ewpt::find_child(std::uint32_t parent, KeyId key,
                                              std::uint64_t& comparisons) const {
  const auto& children = nodes_[parent].children;
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (nodes_[children[i]].key == key) {
      comparisons += i + 1;
      return children[i];
    }
  }
  comparisons += children.size();
  return std::nullopt;
}

std::string Ewpt::render(const AttributeSpace& space) const {
  std::ostringstream out;
  auto walk = [&](auto&& self, std::uint32_t n, int depth) -> void {
    for (auto c : nodes_[n].children) {
      const auto p = space.pair(nodes_[c].key);
      out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << p.attr << '=' << p.value
          << (nodes_[c].is_leaf() ? " *" : "") << '\n';
      self(self, c, depth + 1);
    }
  };
  walk(walk, kRoot, 0);
  return out.str();
}

std::vector<KeyId> sort_keys(std::vector<KeyId> keys, const std::vector<std::size_t>& ranks) {
  std::sort(keys.begin(), keys.end(), [&](KeyId a, KeyId b) {
    const auto ra = ranks[key_attr(a)];
    const auto rb = ranks[key_attr(b)];
    if (ra != rb) return ra < rb;
    return key_value(a) < key_value(b);
  });
  return keys;
}

Ewpt build_tree(std::span<const PolicyRule> policies, const WeightList& weights,
                const AttributeSpace& space) {
  Ewpt tree;
  tree.weight_version_ = weights.version();
  tree.ranks_ = weights.ranks_for(space);

  std::vector<std::size_t> order(policies.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return policies[a].id < policies[b].id; });

  for (auto idx : order) {
    const auto& rule = policies[idx];
    std::vector<KeyId> keys;
    keys.reserve(rule.constraints.size());
    for (const auto& c : rule.constraints) {
      const auto k = space.key(c);
      if (tree.ranks_[key_attr(k)] == SIZE_MAX) {
        throw Error(Errc::unknown_attribute, c.attr + " is not in the weight list");
      }
      keys.push_back(k);
    }
    keys = sort_keys(std::move(keys), tree.ranks_);

    std::uint32_t current = Ewpt::kRoot;
    for (KeyId k : keys) {
      std::uint64_t unused = 0;
      if (auto child = tree.find_child(current, k, unused)) {
        current = *child;
        continue;
      }
      const auto fresh = static_cast<std::uint32_t>(tree.nodes_.size());
      tree.nodes_.push_back(PathNode{k, {}, {}});
      tree.nodes_[current].children.push_back(fresh);
      current = fresh;
    }
    auto& ids = tree.nodes_[current].rule_ids;
    if (std::find(ids.begin(), ids.end(), rule.id) == ids.end()) ids.push_back(rule.id);
  }
  return tree;
}

std::vector<AVPair> sort_request_attributes(const AccessRequest& req, const Registry& registry,
                                            const WeightList& weights) {
  const auto* object = registry.find_object(req.object_id);
  if (!object) throw Error(Errc::unknown_object, req.object_id);
  const auto& space = registry.space();

  std::vector<AVPair> pairs = req.signed_credential.credential.pairs();
  pairs.insert(pairs.end(), object->pairs.begin(), object->pairs.end());
  if (!req.op.empty()) {
    bool found = false;
    for (auto a : space.of_class(AttrClass::operation)) {
      if (space.value_index(a, req.op)) {
        pairs.push_back({space.at(a).name, req.op});
        found = true;
        break;
      }
    }
    if (!found) throw Error(Errc::out_of_domain, "operation " + req.op);
  }
  pairs.insert(pairs.end(), req.env.begin(), req.env.end());

  std::vector<std::pair<std::size_t, AVPair>> ranked;
  ranked.reserve(pairs.size());
  for (auto& p : pairs) {
    const auto r = weights.rank_of(p.attr);
    if (!r) throw Error(Errc::unknown_attribute, p.attr);
    ranked.emplace_back(*r, std::move(p));
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<AVPair> out;
  out.reserve(ranked.size());
  for (auto& [r, p] : ranked) out.push_back(std::move(p));
  return out;
}

MatchResult match_strict(const Ewpt& tree, std::span<const KeyId> seq) {
  MatchResult res;
  std::uint32_t current = Ewpt::kRoot;
  for (KeyId k : seq) {
    auto child = tree.find_child(current, k, res.comparisons);
    if (!child) {
      res.failure = PathFailure::no_path;
      return res;
    }
    current = *child;
  }
  res.matched = tree.node(current).is_leaf();
  if (!res.matched) res.failure = PathFailure::incomplete_path;
  return res;
}

MatchResult match_subset(const Ewpt& tree, std::span<const KeyId> seq) {
  MatchResult res;
  const std::size_t width = seq.size() + 1;
  // (node, position) pairs already known not to reach a leaf.
  std::vector<std::uint8_t> dead(tree.node_count() * width, 0);

  auto search = [&](auto&& self, std::uint32_t node, std::size_t pos) -> bool {
    if (tree.node(node).is_leaf()) return true;
    auto& memo = dead[node * width + pos];
    if (memo) return false;
    for (std::size_t j = pos; j < seq.size(); ++j) {
      if (auto child = tree.find_child(node, seq[j], res.comparisons)) {
        if (self(self, *child, j + 1)) return true;
      }
    }
    memo = 1;
    return false;
  };

  res.matched = search(search, Ewpt::kRoot, 0);
  if (!res.matched) res.failure = PathFailure::no_path;
  return res;
}

MatchResult linear_scan_counted(std::span<const PolicyRule> policies,
                                const std::vector<AVPair>& sorted_req_pairs,
                                ScanSemantics semantics) {
  MatchResult res;
  for (const auto& rule : policies) {
    bool ok = true;
    if (semantics == ScanSemantics::exact) {
      ++res.comparisons;
      ok = rule.constraints.size() == sorted_req_pairs.size();
      for (std::size_t i = 0; ok && i < rule.constraints.size(); ++i) {
        ++res.comparisons;
        ok = rule.constraints[i] == sorted_req_pairs[i];
      }
    } else {
      for (const auto& c : rule.constraints) {
        ++res.comparisons;
        if (!std::binary_search(sorted_req_pairs.begin(), sorted_req_pairs.end(), c)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      res.matched = true;
      return res;
    }
  }
  res.failure = PathFailure::no_path;
  return res;
}

bool linear_scan(std::span<const PolicyRule> policies, const std::vector<AVPair>& req_pairs,
                 ScanSemantics semantics) {
  std::vector<AVPair> sorted = req_pairs;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& rule : policies) {
    std::vector<AVPair> constraints = rule.constraints;
    std::sort(constraints.begin(), constraints.end());
    const bool ok = semantics == ScanSemantics::exact
                        ? constraints == sorted
                        : std::includes(sorted.begin(), sorted.end(), constraints.begin(),
                                        constraints.end());
    if (ok) return true;
  }
  return false;
}

}  // namespace qae
