#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qae/anonymity.hpp"
#include "qae/ewpt.hpp"
#include "qae/optimizer.hpp"

namespace qae {

enum class MatchMode { strict, subset };

enum class Variant {
  full,    // weights recomputed and tree rebuilt every K decisions
  fixed,   // one tree from the initial weights, never rebuilt
  linear,  // no tree; scan of the flat rule set
};

const char* to_string(MatchMode m) noexcept;
const char* to_string(Variant v) noexcept;
MatchMode parse_match_mode(std::string_view s);
Variant parse_variant(std::string_view s);

struct EngineConfig {
  double threshold = 1.0;  // bits
  MatchMode mode = MatchMode::strict;
  std::uint64_t update_interval = 1000;  // K
  std::size_t pool_capacity = AAHPool::kDefaultCapacity;
  AnonymityTerm anonymity_term = AnonymityTerm::normalized;
  // Ed25519 is deterministic, so a (pk, message, signature) triple that
  // verified once always verifies.
  bool cache_verifications = true;

  void validate() const;
};

struct Decision {
  Outcome outcome = Outcome::deny;
  Reason reason = Reason::no_path;
  std::uint64_t comparisons = 0;
  std::optional<double> entropy;  // empty when the signature step failed
  std::uint64_t seq = 0;
};

/// Tree and the weight list it was built from, published together.
struct TreeSnapshot {
  WeightList weights;
  Ewpt tree;
};

/// Authorization pipeline: signature check, anonymity floor, path match.
///
/// `evaluate` is a read over the current state and may run concurrently with
/// other `evaluate` calls; `commit` and `maybe_rebuild` are single-writer.
class Engine {
 public:
  Engine(const Registry& registry, std::vector<PolicyRule> policies, EngineConfig config,
         Variant variant, WeightList initial);
  Engine(const Registry& registry, std::vector<PolicyRule> policies, EngineConfig config,
         Variant variant);

  /// evaluate + commit + maybe_rebuild.
  Decision authorize(const AccessRequest& req);

  Decision evaluate(const AccessRequest& req) const;

  /// Records the decision to the ledger and the pool.
  void commit(const AccessRequest& req, const Decision& d);

  /// Rebuilds every K committed decisions for the full variant. Returns true
  /// when a new snapshot was published.
  bool maybe_rebuild();

  /// Unconditional recompute-and-publish; no-op for fixed and linear.
  void rebuild();

  std::shared_ptr<const TreeSnapshot> snapshot() const;

  const Registry& registry() const noexcept { return registry_; }
  const Ledger& ledger() const noexcept { return ledger_; }
  const AAHPool& pool() const noexcept { return pool_; }
  const EngineConfig& config() const noexcept { return config_; }
  const std::vector<PolicyRule>& policies() const noexcept { return policies_; }
  Variant variant() const noexcept { return variant_; }
  std::size_t rebuild_count() const noexcept { return rebuilds_; }
  std::uint64_t committed() const noexcept { return committed_; }

  /// E_req of `c` under the current ledger (uses the engine's cache).
  std::optional<double> credential_entropy(const Credential& c) const;

 private:
  struct UsageStats {
    std::vector<std::uint32_t> generators;
    std::unordered_map<std::uint32_t, std::uint64_t> weights;  // subject row -> weight
    std::optional<double> entropy;
  };

  bool verify(const crypto::SignedCredential& sc) const;
  std::vector<AVPair> request_pairs(const AccessRequest& req, const ObjectRecord* object) const;
  UsageStats& stats_for(const Credential& c, const std::string& key) const;
  void publish(std::shared_ptr<const TreeSnapshot> s);

  const Registry& registry_;
  std::vector<PolicyRule> policies_;
  EngineConfig config_;
  Variant variant_;

  Ledger ledger_;
  AAHPool pool_;
  std::vector<std::uint32_t> op_attrs_;
  std::uint64_t committed_ = 0;
  std::size_t rebuilds_ = 0;

  mutable std::mutex snapshot_mu_;
  std::shared_ptr<const TreeSnapshot> snapshot_;

  mutable std::shared_mutex cache_mu_;
  mutable std::unordered_set<std::string> verified_;
  mutable std::unordered_map<std::string, UsageStats> usage_;
};

std::string decision_json(const Decision& d, Variant variant);

}  // namespace qae
