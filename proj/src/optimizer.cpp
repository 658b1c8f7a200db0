#include "qae/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "qae/anonymity.hpp"
#include "qae/entropy.hpp"
#include "qae/error.hpp"

namespace qae {
namespace {

const std::string* value_of(const std::vector<AVPair>& sorted_pairs, std::string_view attr) {
  auto it = std::lower_bound(sorted_pairs.begin(), sorted_pairs.end(), attr,
                             [](const AVPair& p, std::string_view a) { return p.attr < a; });
  if (it == sorted_pairs.end() || it->attr != attr) return nullptr;
  return &it->value;
}

double gain_from_table(const Eigen::ArrayX2d& table, double h_d) {
  const double gain = h_d - conditional_entropy(table);
  return std::clamp(gain, 0.0, h_d);
}

// Contingency tables for every attribute in one pass over the pool. Row
// `domain.size()` is the absent bucket.
std::vector<Eigen::ArrayX2d> contingency_tables(const AAHPool& pool, const AttributeSpace& space) {
  std::vector<Eigen::ArrayX2d> tables;
  tables.reserve(space.size());
  for (const auto& def : space.defs()) {
    tables.push_back(Eigen::ArrayX2d::Zero(static_cast<Eigen::Index>(def.domain.size()) + 1, 2));
  }
  std::vector<bool> present(space.size());
  for (const auto& rec : pool.records()) {
    const int col = rec.outcome == Outcome::grant ? 0 : 1;
    std::fill(present.begin(), present.end(), false);
    for (const auto& p : rec.pairs) {
      auto a = space.index_of(p.attr);
      if (!a) continue;
      auto v = space.value_index(*a, p.value);
      if (!v) continue;
      tables[*a](*v, col) += 1.0;
      present[*a] = true;
    }
    for (std::size_t a = 0; a < space.size(); ++a) {
      if (!present[a]) tables[a](tables[a].rows() - 1, col) += 1.0;
    }
  }
  return tables;
}

}  // namespace

AAHPool::AAHPool(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error(Errc::invalid_argument, "pool capacity must be positive");
}

void AAHPool::record(DecisionRecord rec) {
  if (rec.seq <= last_seq_ && !(records_.empty() && last_seq_ == 0)) {
    throw Error(Errc::non_monotone_seq, std::to_string(rec.seq));
  }
  last_seq_ = rec.seq;
  if (rec.outcome == Outcome::grant) ++grants_;
  records_.push_back(std::move(rec));
  if (records_.size() > capacity_) {
    if (records_.front().outcome == Outcome::grant) --grants_;
    records_.pop_front();
  }
}

double decision_entropy(const AAHPool& pool) {
  return binary_entropy(static_cast<double>(pool.grants()),
                        static_cast<double>(pool.size() - pool.grants()));
}

double information_gain(const AAHPool& pool, std::string_view attr) {
  if (pool.size() == 0) return 0.0;
  std::map<std::optional<std::string>, Eigen::Array2d> partitions;
  for (const auto& rec : pool.records()) {
    const auto* v = value_of(rec.pairs, attr);
    auto& counts = partitions.try_emplace(v ? std::optional(*v) : std::nullopt,
                                          Eigen::Array2d::Zero())
                       .first->second;
    counts(rec.outcome == Outcome::grant ? 0 : 1) += 1.0;
  }
  Eigen::ArrayX2d table(static_cast<Eigen::Index>(partitions.size()), 2);
  Eigen::Index row = 0;
  for (const auto& [value, counts] : partitions) table.row(row++) = counts.transpose();
  return gain_from_table(table, decision_entropy(pool));
}

double attribute_anonymity(const Registry& registry, std::string_view attr) {
  const auto idx = registry.space().index_of(attr);
  if (!idx) throw Error(Errc::unknown_attribute, std::string(attr));
  const auto n = registry.subject_count();
  if (n == 0) throw Error(Errc::empty_population, "attribute anonymity needs subjects");
  if (n < 2) return 0.0;
  std::size_t r_a = n;
  const auto col = registry.matrix().column_of(*idx);
  if (col >= 0) {
    const auto counts = registry.matrix().value_counts(
        col, static_cast<Eigen::Index>(registry.space().at(*idx).domain.size()));
    for (Eigen::Index v = 0; v < counts.size(); ++v) {
      if (counts(v) > 0) r_a = std::min(r_a, static_cast<std::size_t>(counts(v)));
    }
  }
  return std::log2(static_cast<double>(r_a)) / std::log2(static_cast<double>(n));
}

WeightList::WeightList(std::vector<WeightEntry> entries, std::uint64_t version)
    : entries_(std::move(entries)), version_(version) {
  std::sort(entries_.begin(), entries_.end(), [](const WeightEntry& a, const WeightEntry& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.attr < b.attr;
  });
}

WeightList WeightList::initial(const AttributeSpace& space) {
  std::vector<WeightEntry> entries;
  for (const auto& d : space.defs()) entries.push_back({d.name, 0.0, 0.0, d.initial_weight});
  return WeightList(std::move(entries), 0);
}

std::optional<std::size_t> WeightList::rank_of(std::string_view attr) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].attr == attr) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> WeightList::ranks_for(const AttributeSpace& space) const {
  std::vector<std::size_t> ranks(space.size(), SIZE_MAX);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (auto a = space.index_of(entries_[i].attr)) ranks[*a] = i;
  }
  return ranks;
}

bool WeightList::same_order(const WeightList& o) const {
  return std::equal(entries_.begin(), entries_.end(), o.entries_.begin(), o.entries_.end(),
                    [](const WeightEntry& a, const WeightEntry& b) { return a.attr == b.attr; });
}

WeightList compute_weights(const AttributeSpace& space, const AAHPool& pool,
                           const Registry& registry, AnonymityTerm term, std::uint64_t version) {
  const double h_d = decision_entropy(pool);
  const auto tables = contingency_tables(pool, space);

  double global_r = 0.0;
  if (term == AnonymityTerm::raw_global_r && registry.subject_count() > 0) {
    try {
      global_r = static_cast<double>(rt_anonymity(registry, Ledger{}, 1).r);
    } catch (const Error& e) {
      if (e.code() != Errc::empty_cohort) throw;
    }
  }

  std::vector<WeightEntry> entries;
  entries.reserve(space.size());
  for (std::size_t a = 0; a < space.size(); ++a) {
    WeightEntry e;
    e.attr = space.at(a).name;
    e.info_gain = pool.size() == 0 ? 0.0 : gain_from_table(tables[a], h_d);
    if (term == AnonymityTerm::raw_global_r) {
      e.anonymity = global_r;
    } else {
      e.anonymity = registry.subject_count() == 0 ? 0.0 : attribute_anonymity(registry, e.attr);
    }
    e.weight = e.info_gain + e.anonymity;
    entries.push_back(std::move(e));
  }
  return WeightList(std::move(entries), version);
}

std::string weights_csv(const WeightList& w) {
  std::ostringstream out;
  out.precision(17);
  out << "attr,info_gain,anonymity_term,weight,rank\n";
  for (std::size_t i = 0; i < w.entries().size(); ++i) {
    const auto& e = w.entries()[i];
    out << e.attr << ',' << e.info_gain << ',' << e.anonymity << ',' << e.weight << ',' << i + 1
        << '\n';
  }
  return out.str();
}

}  // namespace qae
