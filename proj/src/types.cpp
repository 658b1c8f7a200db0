#include "qae/types.hpp"

#include <algorithm>

#include "qae/error.hpp"

namespace qae {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::duplicate_name: return "duplicate name";
    case Errc::empty_domain: return "empty domain";
    case Errc::unknown_class: return "unknown class";
    case Errc::out_of_domain: return "out of domain";
    case Errc::wrong_class: return "wrong attribute class";
    case Errc::duplicate_attribute: return "duplicate attribute";
    case Errc::unknown_attribute: return "unknown attribute";
    case Errc::unknown_subject: return "unknown subject";
    case Errc::unknown_object: return "unknown object";
    case Errc::not_assigned: return "attribute not assigned";
    case Errc::empty_credential: return "empty credential";
    case Errc::non_monotone_seq: return "non-monotone seq";
    case Errc::corrupt_file: return "corrupt file";
    case Errc::version_mismatch: return "version mismatch";
    case Errc::io_error: return "io error";
    case Errc::bad_seed: return "malformed seed";
    case Errc::encoding_error: return "encoding error";
    case Errc::forged_credential: return "forged credential";
    case Errc::invalid_configuration: return "invalid credential configuration";
    case Errc::empty_cohort: return "empty cohort";
    case Errc::invalid_argument: return "invalid argument";
    case Errc::unknown_case: return "unknown case";
    case Errc::empty_stream: return "empty request stream";
    case Errc::empty_population: return "empty population";
  }
  return "error";
}

const char* to_string(AttrClass c) noexcept {
  switch (c) {
    case AttrClass::subject: return "subject";
    case AttrClass::object: return "object";
    case AttrClass::environment: return "environment";
    case AttrClass::operation: return "operation";
  }
  return "?";
}

AttrClass parse_attr_class(std::string_view s) {
  if (s == "subject") return AttrClass::subject;
  if (s == "object") return AttrClass::object;
  if (s == "environment") return AttrClass::environment;
  if (s == "operation") return AttrClass::operation;
  throw Error(Errc::unknown_class, std::string(s));
}

Credential::Credential(std::vector<AVPair> pairs) : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

bool Credential::subset_of(const std::vector<AVPair>& sorted_other) const {
  return std::includes(sorted_other.begin(), sorted_other.end(), pairs_.begin(), pairs_.end());
}

std::string Credential::key() const {
  std::string k;
  for (const auto& p : pairs_) {
    k += std::to_string(p.attr.size());
    k += ':';
    k += p.attr;
    k += std::to_string(p.value.size());
    k += ':';
    k += p.value;
  }
  return k;
}

bool operator==(const AttributeDef& a, const AttributeDef& b) {
  return a.name == b.name && a.cls == b.cls && a.initial_weight == b.initial_weight &&
         a.domain == b.domain;
}

void AttributeSpace::add(AttributeDef def) {
  if (by_name_.contains(def.name)) throw Error(Errc::duplicate_name, def.name);
  if (def.domain.empty()) throw Error(Errc::empty_domain, def.name);
  if (def.initial_weight < 0.0) {
    throw Error(Errc::invalid_argument, "negative initial weight on " + def.name);
  }
  std::unordered_map<std::string, std::uint32_t> values;
  for (std::uint32_t i = 0; i < def.domain.size(); ++i) {
    if (!values.emplace(def.domain[i], i).second) {
      throw Error(Errc::duplicate_name, def.name + " value " + def.domain[i]);
    }
  }
  const auto idx = static_cast<std::uint32_t>(defs_.size());
  by_name_.emplace(def.name, idx);
  values_.push_back(std::move(values));
  defs_.push_back(std::move(def));
}

std::optional<std::uint32_t> AttributeSpace::index_of(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

const AttributeDef* AttributeSpace::find(std::string_view name) const {
  auto idx = index_of(name);
  return idx ? &defs_[*idx] : nullptr;
}

std::optional<std::uint32_t> AttributeSpace::value_index(std::uint32_t attr,
                                                         std::string_view value) const {
  const auto& m = values_.at(attr);
  auto it = m.find(std::string(value));
  if (it == m.end()) return std::nullopt;
  return it->second;
}

KeyId AttributeSpace::key(const AVPair& p) const {
  auto a = index_of(p.attr);
  if (!a) throw Error(Errc::unknown_attribute, p.attr);
  auto v = value_index(*a, p.value);
  if (!v) throw Error(Errc::out_of_domain, p.attr + "=" + p.value);
  return make_key(*a, *v);
}

AVPair AttributeSpace::pair(KeyId k) const {
  const auto& def = defs_.at(key_attr(k));
  return {def.name, def.domain.at(key_value(k))};
}

std::vector<std::uint32_t> AttributeSpace::of_class(AttrClass c) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < defs_.size(); ++i) {
    if (defs_[i].cls == c) out.push_back(i);
  }
  return out;
}

std::vector<AVPair> normalize_pairs(std::vector<AVPair> pairs) {
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i].attr == pairs[i - 1].attr) {
      throw Error(Errc::duplicate_attribute, pairs[i].attr);
    }
  }
  return pairs;
}

}  // namespace qae
