#include "qae/model.hpp"

#include <algorithm>
#include <fstream>

#include "qae/error.hpp"
#include "qae/io.hpp"

namespace qae {

const char* to_string(Outcome o) noexcept { return o == Outcome::grant ? "GRANT" : "DENY"; }

const char* to_string(Reason r) noexcept {
  switch (r) {
    case Reason::granted: return "granted";
    case Reason::bad_signature: return "bad-signature";
    case Reason::low_anonymity: return "low-anonymity";
    case Reason::no_path: return "no-path";
    case Reason::incomplete_path: return "incomplete-path";
  }
  return "?";
}

Outcome parse_outcome(std::string_view s) {
  if (s == "GRANT") return Outcome::grant;
  if (s == "DENY") return Outcome::deny;
  throw Error(Errc::corrupt_file, "outcome " + std::string(s));
}

Reason parse_reason(std::string_view s) {
  for (auto r : {Reason::granted, Reason::bad_signature, Reason::low_anonymity, Reason::no_path,
                 Reason::incomplete_path}) {
    if (s == to_string(r)) return r;
  }
  throw Error(Errc::corrupt_file, "reason " + std::string(s));
}

// ---------------------------------------------------------------- matrix

SubjectMatrix::SubjectMatrix(std::vector<std::uint32_t> columns_to_attrs)
    : col_attr_(std::move(columns_to_attrs)) {
  data_.resize(0, static_cast<Eigen::Index>(col_attr_.size()));
  std::uint32_t max_attr = 0;
  for (auto a : col_attr_) max_attr = std::max(max_attr, a + 1);
  attr_col_.assign(max_attr, -1);
  for (std::size_t c = 0; c < col_attr_.size(); ++c) {
    attr_col_[col_attr_[c]] = static_cast<Eigen::Index>(c);
  }
}

Eigen::Index SubjectMatrix::column_of(std::uint32_t attr) const {
  return attr < attr_col_.size() ? attr_col_[attr] : -1;
}

void SubjectMatrix::append_row(std::span<const KeyId> keys) {
  if (rows_ == data_.rows()) {
    const Eigen::Index grown = std::max<Eigen::Index>(16, data_.rows() * 2);
    data_.conservativeResize(grown, Eigen::NoChange);
  }
  data_.row(rows_).setConstant(kUnassigned);
  for (KeyId k : keys) {
    const auto col = column_of(key_attr(k));
    if (col < 0) throw Error(Errc::wrong_class, "attribute index " + std::to_string(key_attr(k)));
    data_(rows_, col) = static_cast<std::int32_t>(key_value(k));
  }
  ++rows_;
}

Eigen::Array<bool, Eigen::Dynamic, 1> SubjectMatrix::superset_mask(
    std::span<const KeyId> keys) const {
  Eigen::Array<bool, Eigen::Dynamic, 1> mask =
      Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(rows_, true);
  for (KeyId k : keys) {
    const auto col = column_of(key_attr(k));
    if (col < 0) return Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(rows_, false);
    mask = mask && (values().col(col).array() == static_cast<std::int32_t>(key_value(k)));
  }
  return mask;
}

std::vector<std::uint32_t> SubjectMatrix::superset_rows(std::span<const KeyId> keys) const {
  const auto mask = superset_mask(keys);
  std::vector<std::uint32_t> rows;
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    if (mask(i)) rows.push_back(static_cast<std::uint32_t>(i));
  }
  return rows;
}

Eigen::Index SubjectMatrix::superset_count(std::span<const KeyId> keys) const {
  return superset_mask(keys).count();
}

Eigen::VectorXi SubjectMatrix::value_counts(Eigen::Index column, Eigen::Index domain_size) const {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(domain_size);
  const auto col = values().col(column);
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    if (col(i) >= 0) ++counts(col(i));
  }
  return counts;
}

// -------------------------------------------------------------- registry

Registry::Registry(AttributeSpace space)
    : space_(std::move(space)), matrix_(space_.of_class(AttrClass::subject)) {}

std::vector<AVPair> Registry::validate(std::vector<AVPair> pairs, bool subject) const {
  for (const auto& p : pairs) {
    const auto* def = space_.find(p.attr);
    if (!def) throw Error(Errc::unknown_attribute, p.attr);
    if (subject && def->cls != AttrClass::subject) throw Error(Errc::wrong_class, p.attr);
    if (!subject && def->cls != AttrClass::object) throw Error(Errc::wrong_class, p.attr);
    if (std::find(def->domain.begin(), def->domain.end(), p.value) == def->domain.end()) {
      throw Error(Errc::out_of_domain, p.attr + "=" + p.value);
    }
  }
  return normalize_pairs(std::move(pairs));
}

std::string Registry::register_subject(std::vector<AVPair> pairs, const crypto::PublicKey& pk,
                                       std::optional<std::string> id) {
  pairs = validate(std::move(pairs), true);
  std::string sid = id ? std::move(*id) : "s" + std::to_string(subjects_.size() + 1);
  if (subject_ids_.contains(sid)) throw Error(Errc::duplicate_name, "subject " + sid);
  if (by_pk_.contains(pk)) throw Error(Errc::duplicate_name, "public key of " + sid);
  const auto row = static_cast<std::uint32_t>(subjects_.size());
  matrix_.append_row(keys(pairs));
  max_subject_attrs_ = std::max(max_subject_attrs_, pairs.size());
  subject_ids_.emplace(sid, row);
  by_pk_.emplace(pk, row);
  subjects_.push_back({sid, std::move(pairs), pk});
  return sid;
}

void Registry::register_object(std::string id, std::vector<AVPair> pairs) {
  pairs = validate(std::move(pairs), false);
  if (object_ids_.contains(id)) throw Error(Errc::duplicate_name, "object " + id);
  object_ids_.emplace(id, static_cast<std::uint32_t>(objects_.size()));
  objects_.push_back({std::move(id), std::move(pairs)});
}

const SubjectRecord& Registry::subject(std::string_view id) const {
  auto idx = subject_index(id);
  if (!idx) throw Error(Errc::unknown_subject, std::string(id));
  return subjects_[*idx];
}

std::optional<std::uint32_t> Registry::subject_index(std::string_view id) const {
  auto it = subject_ids_.find(std::string(id));
  if (it == subject_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> Registry::subject_by_pk(const crypto::PublicKey& pk) const {
  auto it = by_pk_.find(pk);
  if (it == by_pk_.end()) return std::nullopt;
  return it->second;
}

const ObjectRecord* Registry::find_object(std::string_view id) const {
  auto it = object_ids_.find(std::string(id));
  return it == object_ids_.end() ? nullptr : &objects_[it->second];
}

Credential Registry::derive_credential(std::string_view subject_id,
                                       const std::vector<std::string>& names) const {
  const auto& s = subject(subject_id);
  if (names.empty()) throw Error(Errc::empty_credential, std::string(subject_id));
  std::vector<AVPair> picked;
  for (const auto& name : names) {
    auto it = std::find_if(s.pairs.begin(), s.pairs.end(),
                           [&](const AVPair& p) { return p.attr == name; });
    if (it == s.pairs.end()) throw Error(Errc::not_assigned, name + " on " + s.id);
    picked.push_back(*it);
  }
  return Credential(std::move(picked));
}

std::vector<KeyId> Registry::keys(std::span<const AVPair> pairs) const {
  std::vector<KeyId> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(space_.key(p));
  return out;
}

bool Registry::operator==(const Registry& o) const {
  return space_ == o.space_ && subjects_ == o.subjects_ && objects_ == o.objects_;
}

// ---------------------------------------------------------------- ledger

void Ledger::append(HistoryRecord record) {
  const auto seq = record.request.seq;
  if (!records_.empty() && seq <= last_seq_) {
    throw Error(Errc::non_monotone_seq,
                std::to_string(seq) + " after " + std::to_string(last_seq_));
  }
  last_seq_ = seq;
  if (record.reason != Reason::bad_signature) {
    by_credential_[record.request.signed_credential.credential.key()].push_back(
        static_cast<std::uint32_t>(records_.size()));
  }
  records_.push_back(std::move(record));
}

std::vector<UsageEntry> Ledger::query_by_credential(const Credential& c) const {
  std::vector<UsageEntry> out;
  auto it = by_credential_.find(c.key());
  if (it == by_credential_.end()) return out;
  for (auto idx : it->second) {
    out.push_back({records_[idx].true_subject, records_[idx].request.seq});
  }
  return out;
}

std::map<std::string, std::uint64_t> Ledger::usage_counts(const Credential& c) const {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& u : query_by_credential(c)) ++counts[u.subject];
  return counts;
}

// ----------------------------------------------------------- persistence

namespace {
constexpr const char* kFormat = "qaebac-state";
constexpr int kVersion = 1;
}  // namespace

void snapshot(const State& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  const auto& reg = state.registry;
  io::json header = {{"format", kFormat},
                     {"version", kVersion},
                     {"space", io::to_json(reg.space())},
                     {"subjects", reg.subject_count()},
                     {"objects", reg.object_count()},
                     {"history", state.ledger.size()}};
  out << header.dump() << '\n';
  for (const auto& s : reg.subjects()) out << io::subject_to_json(s).dump() << '\n';
  for (const auto& o : reg.objects()) out << io::object_to_json(o).dump() << '\n';
  for (const auto& h : state.ledger.records()) {
    io::json line = io::to_json(h);
    line["kind"] = "history";
    out << line.dump() << '\n';
  }
  if (!out) throw Error(Errc::io_error, "short write to " + path);
}

State load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::corrupt_file, "missing header in " + path);
  try {
    const auto header = io::json::parse(line);
    if (header.at("format") != kFormat) throw Error(Errc::corrupt_file, "not a state file");
    if (header.at("version") != kVersion) {
      throw Error(Errc::version_mismatch, header.at("version").dump());
    }
    State state{Registry(io::load_attribute_space(header.at("space"))), Ledger{}};
    const auto n_sub = header.at("subjects").get<std::size_t>();
    const auto n_obj = header.at("objects").get<std::size_t>();
    const auto n_hist = header.at("history").get<std::size_t>();
    std::size_t seen_hist = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = io::json::parse(line);
      if (j.at("kind") == "history") {
        state.ledger.append(io::history_from_json(j));
        ++seen_hist;
      } else {
        io::apply_population_line(state.registry, j);
      }
    }
    if (state.registry.subject_count() != n_sub || state.registry.object_count() != n_obj ||
        seen_hist != n_hist) {
      throw Error(Errc::corrupt_file, "record counts disagree with header in " + path);
    }
    return state;
  } catch (const io::json::exception& e) {
    throw Error(Errc::corrupt_file, e.what());
  }
}

}  // namespace qae
