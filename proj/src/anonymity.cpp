#include "qae/anonymity.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "qae/entropy.hpp"
#include "qae/error.hpp"

namespace qae {
namespace {

// Key ids for the credential, or nullopt when some pair lies outside the
// attribute space (nobody can hold it).
std::optional<std::vector<KeyId>> credential_keys(const Credential& c, const Registry& registry) {
  std::vector<KeyId> keys;
  keys.reserve(c.size());
  for (const auto& p : c.pairs()) {
    auto a = registry.space().index_of(p.attr);
    if (!a) return std::nullopt;
    auto v = registry.space().value_index(*a, p.value);
    if (!v) return std::nullopt;
    keys.push_back(make_key(*a, *v));
  }
  return keys;
}

struct SpaceSummary {
  std::size_t size = 0;
  double entropy = 0.0;
};

// Per-subject space of the full pair set, memoized on identical pair sets.
class FullSpaces {
 public:
  FullSpaces(const Registry& registry, const Ledger& history)
      : registry_(registry), history_(history) {}

  const SpaceSummary& of(std::uint32_t row) {
    const Credential c(registry_.subjects()[row].pairs);
    auto [it, fresh] = memo_.try_emplace(c.key());
    if (fresh) {
      const auto ss = subject_space(c, registry_, history_);
      it->second = {ss.size(), request_entropy(ss)};
    }
    return it->second;
  }

 private:
  const Registry& registry_;
  const Ledger& history_;
  std::unordered_map<std::string, SpaceSummary> memo_;
};

std::vector<std::uint32_t> cohort_rows(const Registry& registry, std::size_t t) {
  std::vector<std::uint32_t> rows;
  const auto& subjects = registry.subjects();
  for (std::uint32_t i = 0; i < subjects.size(); ++i) {
    if (subjects[i].pairs.size() >= t) rows.push_back(i);
  }
  return rows;
}

// Contribution of one t to the score: entropy of every cohort member's
// space, weighted by that space's share of the cohort total.
double cohort_term(const std::vector<std::uint32_t>& cohort, FullSpaces& spaces) {
  double total = 0.0;
  for (auto row : cohort) total += static_cast<double>(spaces.of(row).size);
  if (total == 0.0) return 0.0;
  double acc = 0.0;
  for (auto row : cohort) {
    const auto& s = spaces.of(row);
    acc += s.entropy * (static_cast<double>(s.size) / total);
  }
  return acc;
}

}  // namespace

SubjectSpace subject_space(const Credential& c, const Registry& registry, const Ledger& history) {
  SubjectSpace ss;
  ss.credential = c;
  if (auto keys = credential_keys(c, registry)) {
    for (auto row : registry.matrix().superset_rows(*keys)) {
      const auto& id = registry.subjects()[row].id;
      ss.generators.insert(id);
      ss.members[id] += 1;
    }
  }
  for (const auto& [subject, count] : history.usage_counts(c)) {
    ss.historical_users.insert(subject);
    ss.members[subject] += count;
  }
  return ss;
}

SubjectSpace build_subject_space(const crypto::SignedCredential& sc, const Registry& registry,
                                 const Ledger& history) {
  if (!registry.subject_by_pk(sc.signer_pk) || !crypto::verify_credential(sc.signer_pk, sc)) {
    throw Error(Errc::forged_credential, "signature does not verify");
  }
  auto ss = subject_space(sc.credential, registry, history);
  if (ss.size() == 0) throw Error(Errc::invalid_configuration, "empty subject space");
  return ss;
}

double request_entropy(const SubjectSpace& space) {
  if (space.size() <= 1) return 0.0;
  Eigen::ArrayXd weights(static_cast<Eigen::Index>(space.size()));
  Eigen::Index i = 0;
  for (const auto& [id, w] : space.members) weights(i++) = static_cast<double>(w);
  return shannon_entropy(weights);
}

RTResult rt_anonymity(const Registry& registry, const Ledger& history, std::size_t t) {
  if (t == 0) throw Error(Errc::invalid_argument, "t must be positive");
  const auto rows = cohort_rows(registry, t);
  if (rows.empty()) throw Error(Errc::empty_cohort, "no subject holds " + std::to_string(t) +
                                                        " attributes");
  FullSpaces spaces(registry, history);
  RTResult res;
  res.t = t;
  res.r = std::numeric_limits<std::size_t>::max();
  for (auto row : rows) {
    res.cohort.push_back(registry.subjects()[row].id);
    res.r = std::min(res.r, spaces.of(row).size);
  }
  return res;
}

double subject_anonymity(std::string_view subject_id, const Registry& registry,
                         const Ledger& history) {
  const auto& s = registry.subject(subject_id);
  FullSpaces spaces(registry, history);
  double score = 0.0;
  for (std::size_t t = 1; t <= s.pairs.size(); ++t) {
    score += cohort_term(cohort_rows(registry, t), spaces);
  }
  return score;
}

std::vector<double> subject_anonymity_by_size(const Registry& registry, const Ledger& history) {
  FullSpaces spaces(registry, history);
  std::vector<double> cumulative(registry.max_subject_attrs() + 1, 0.0);
  for (std::size_t t = 1; t < cumulative.size(); ++t) {
    cumulative[t] = cumulative[t - 1] + cohort_term(cohort_rows(registry, t), spaces);
  }
  return cumulative;
}

}  // namespace qae
