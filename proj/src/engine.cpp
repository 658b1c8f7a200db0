#include "qae/engine.hpp"

#include <algorithm>

#include "json.hpp"
#include "qae/entropy.hpp"
#include "qae/error.hpp"

namespace qae {

const char* to_string(MatchMode m) noexcept { return m == MatchMode::strict ? "strict" : "subset"; }

const char* to_string(Variant v) noexcept {
  switch (v) {
    case Variant::full: return "full";
    case Variant::fixed: return "static";
    case Variant::linear: return "linear";
  }
  return "?";
}

MatchMode parse_match_mode(std::string_view s) {
  if (s == "strict") return MatchMode::strict;
  if (s == "subset") return MatchMode::subset;
  throw Error(Errc::invalid_argument, "mode " + std::string(s));
}

Variant parse_variant(std::string_view s) {
  if (s == "full") return Variant::full;
  if (s == "static") return Variant::fixed;
  if (s == "linear") return Variant::linear;
  throw Error(Errc::invalid_argument, "variant " + std::string(s));
}

void EngineConfig::validate() const {
  if (!(threshold >= 0.0)) throw Error(Errc::invalid_argument, "threshold must be >= 0");
  if (update_interval == 0) throw Error(Errc::invalid_argument, "update interval must be >= 1");
  if (pool_capacity == 0) throw Error(Errc::invalid_argument, "pool capacity must be >= 1");
}

namespace {

std::optional<double> entropy_of(const std::unordered_map<std::uint32_t, std::uint64_t>& w) {
  if (w.empty()) return std::nullopt;
  if (w.size() == 1) return 0.0;
  Eigen::ArrayXd weights(static_cast<Eigen::Index>(w.size()));
  Eigen::Index i = 0;
  for (const auto& [row, count] : w) weights(i++) = static_cast<double>(count);
  return shannon_entropy(weights);
}

std::string verification_key(const crypto::SignedCredential& sc, const std::string& cred_key) {
  std::string k(reinterpret_cast<const char*>(sc.signer_pk.data()), sc.signer_pk.size());
  k.append(reinterpret_cast<const char*>(sc.signature.data()), sc.signature.size());
  k += cred_key;
  return k;
}

}  // namespace

Engine::Engine(const Registry& registry, std::vector<PolicyRule> policies, EngineConfig config,
               Variant variant)
    : Engine(registry, std::move(policies), config, variant,
             WeightList::initial(registry.space())) {}

Engine::Engine(const Registry& registry, std::vector<PolicyRule> policies, EngineConfig config,
               Variant variant, WeightList initial)
    : registry_(registry),
      policies_(std::move(policies)),
      config_(config),
      variant_(variant),
      pool_(config.pool_capacity),
      op_attrs_(registry.space().of_class(AttrClass::operation)) {
  config_.validate();
  for (auto& rule : policies_) rule.constraints = normalize_pairs(std::move(rule.constraints));
  std::stable_sort(policies_.begin(), policies_.end(),
                   [](const PolicyRule& a, const PolicyRule& b) { return a.id < b.id; });
  auto snap = std::make_shared<TreeSnapshot>();
  if (variant_ != Variant::linear) snap->tree = build_tree(policies_, initial, registry_.space());
  snap->weights = std::move(initial);
  snapshot_ = std::move(snap);
}

std::shared_ptr<const TreeSnapshot> Engine::snapshot() const {
  std::lock_guard lock(snapshot_mu_);
  return snapshot_;
}

void Engine::publish(std::shared_ptr<const TreeSnapshot> s) {
  std::lock_guard lock(snapshot_mu_);
  snapshot_ = std::move(s);
}

std::vector<AVPair> Engine::request_pairs(const AccessRequest& req,
                                          const ObjectRecord* object) const {
  std::vector<AVPair> pairs = req.signed_credential.credential.pairs();
  if (object) pairs.insert(pairs.end(), object->pairs.begin(), object->pairs.end());
  if (!req.op.empty()) {
    for (auto a : op_attrs_) {
      if (registry_.space().value_index(a, req.op)) {
        pairs.push_back({registry_.space().at(a).name, req.op});
        break;
      }
    }
  }
  pairs.insert(pairs.end(), req.env.begin(), req.env.end());
  return pairs;
}

bool Engine::verify(const crypto::SignedCredential& sc) const {
  if (!registry_.subject_by_pk(sc.signer_pk)) return false;
  if (!config_.cache_verifications) return crypto::verify_credential(sc.signer_pk, sc);
  const auto key = verification_key(sc, sc.credential.key());
  {
    std::shared_lock lock(cache_mu_);
    if (verified_.contains(key)) return true;
  }
  if (!crypto::verify_credential(sc.signer_pk, sc)) return false;
  std::unique_lock lock(cache_mu_);
  verified_.insert(key);
  return true;
}

Engine::UsageStats& Engine::stats_for(const Credential& c, const std::string& key) const {
  {
    std::shared_lock lock(cache_mu_);
    if (auto it = usage_.find(key); it != usage_.end()) return it->second;
  }
  UsageStats stats;
  std::vector<KeyId> keys;
  bool representable = true;
  for (const auto& p : c.pairs()) {
    auto a = registry_.space().index_of(p.attr);
    auto v = a ? registry_.space().value_index(*a, p.value) : std::nullopt;
    if (!v) {
      representable = false;
      break;
    }
    keys.push_back(make_key(*a, *v));
  }
  if (representable) stats.generators = registry_.matrix().superset_rows(keys);
  for (auto row : stats.generators) stats.weights[row] += 1;
  for (const auto& use : ledger_.query_by_credential(c)) {
    if (auto row = registry_.subject_index(use.subject)) stats.weights[*row] += 1;
  }
  stats.entropy = entropy_of(stats.weights);
  std::unique_lock lock(cache_mu_);
  return usage_.try_emplace(key, std::move(stats)).first->second;
}

std::optional<double> Engine::credential_entropy(const Credential& c) const {
  return stats_for(c, c.key()).entropy;
}

Decision Engine::evaluate(const AccessRequest& req) const {
  Decision d;
  d.seq = req.seq;
  const auto& sc = req.signed_credential;

  // Step 1: the signature gates everything else.
  if (!verify(sc)) {
    d.reason = Reason::bad_signature;
    return d;
  }

  // Step 2: anonymity floor. An empty subject space has no anonymity at all.
  const auto& stats = stats_for(sc.credential, sc.credential.key());
  d.entropy = stats.entropy.value_or(0.0);
  if (!stats.entropy || *d.entropy < config_.threshold) {
    d.reason = Reason::low_anonymity;
    return d;
  }

  // Step 3: path evaluation.
  const auto* object = registry_.find_object(req.object_id);
  if (!object) {
    d.reason = Reason::no_path;
    return d;
  }
  std::vector<AVPair> pairs = request_pairs(req, object);

  MatchResult m;
  if (variant_ == Variant::linear) {
    std::sort(pairs.begin(), pairs.end());
    m = linear_scan_counted(policies_, pairs,
                            config_.mode == MatchMode::strict ? ScanSemantics::exact
                                                              : ScanSemantics::subset);
  } else {
    const auto snap = snapshot();
    std::vector<KeyId> keys;
    try {
      keys = registry_.keys(pairs);
    } catch (const Error&) {
      d.reason = Reason::no_path;
      return d;
    }
    keys = sort_keys(std::move(keys), snap->tree.ranks());
    m = config_.mode == MatchMode::strict ? match_strict(snap->tree, keys)
                                          : match_subset(snap->tree, keys);
  }
  d.comparisons = m.comparisons;
  if (m.matched) {
    d.outcome = Outcome::grant;
    d.reason = Reason::granted;
  } else {
    d.reason = m.failure == PathFailure::incomplete_path ? Reason::incomplete_path
                                                         : Reason::no_path;
  }
  return d;
}

void Engine::commit(const AccessRequest& req, const Decision& d) {
  const auto& sc = req.signed_credential;
  const auto row = registry_.subject_by_pk(sc.signer_pk);
  HistoryRecord rec{req, row ? registry_.subjects()[*row].id : std::string{}, d.outcome, d.reason,
                    d.entropy.value_or(0.0)};
  ledger_.append(std::move(rec));

  if (d.reason != Reason::bad_signature && row) {
    std::unique_lock lock(cache_mu_);
    if (auto it = usage_.find(sc.credential.key()); it != usage_.end()) {
      it->second.weights[*row] += 1;
      it->second.entropy = entropy_of(it->second.weights);
    }
  }

  DecisionRecord dr;
  dr.pairs = request_pairs(req, registry_.find_object(req.object_id));
  std::sort(dr.pairs.begin(), dr.pairs.end());
  dr.outcome = d.outcome;
  dr.seq = req.seq;
  pool_.record(std::move(dr));
  ++committed_;
}

bool Engine::maybe_rebuild() {
  if (variant_ != Variant::full || committed_ == 0 || committed_ % config_.update_interval != 0) {
    return false;
  }
  rebuild();
  return true;
}

void Engine::rebuild() {
  if (variant_ != Variant::full) return;
  const auto current = snapshot();
  auto next = std::make_shared<TreeSnapshot>();
  next->weights = compute_weights(registry_.space(), pool_, registry_, config_.anonymity_term,
                                  current->weights.version() + 1);
  next->tree = build_tree(policies_, next->weights, registry_.space());
  publish(std::move(next));
  ++rebuilds_;
}

Decision Engine::authorize(const AccessRequest& req) {
  const Decision d = evaluate(req);
  commit(req, d);
  maybe_rebuild();
  return d;
}

std::string decision_json(const Decision& d, Variant variant) {
  nlohmann::json j = {{"seq", d.seq},
                      {"outcome", to_string(d.outcome)},
                      {"reason", to_string(d.reason)},
                      {"entropy", d.entropy.value_or(0.0)},
                      {"comparisons", d.comparisons},
                      {"variant", to_string(variant)}};
  return j.dump();
}

}  // namespace qae
