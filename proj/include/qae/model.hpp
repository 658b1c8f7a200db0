#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "qae/crypto.hpp"
#include "qae/types.hpp"

namespace qae {

struct SubjectRecord {
  std::string id;
  std::vector<AVPair> pairs;  // sorted by attr
  crypto::PublicKey pk{};

  bool operator==(const SubjectRecord&) const = default;
};

struct ObjectRecord {
  std::string id;
  std::vector<AVPair> pairs;

  bool operator==(const ObjectRecord&) const = default;
};

struct PolicyRule {
  std::string id;
  std::vector<AVPair> constraints;  // sorted by attr

  bool operator==(const PolicyRule&) const = default;
};

struct AccessRequest {
  crypto::SignedCredential signed_credential;
  std::string object_id;
  std::string op;
  std::vector<AVPair> env;
  std::uint64_t seq = 0;

  bool operator==(const AccessRequest&) const = default;
};

enum class Outcome { grant, deny };
enum class Reason { granted, bad_signature, low_anonymity, no_path, incomplete_path };

const char* to_string(Outcome o) noexcept;
const char* to_string(Reason r) noexcept;
Outcome parse_outcome(std::string_view s);
Reason parse_reason(std::string_view s);

struct HistoryRecord {
  AccessRequest request;
  std::string true_subject;
  Outcome outcome = Outcome::deny;
  Reason reason = Reason::no_path;
  double entropy = 0.0;

  bool operator==(const HistoryRecord&) const = default;
};

/// Subject attribute distribution matrix: one row per subject, one column
/// per subject-class attribute, entries are value indices or -1 when the
/// subject has no value for that attribute.
class SubjectMatrix {
 public:
  using Storage = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic>;

  static constexpr std::int32_t kUnassigned = -1;

  SubjectMatrix() = default;
  explicit SubjectMatrix(std::vector<std::uint32_t> columns_to_attrs);

  Eigen::Index rows() const noexcept { return rows_; }
  Eigen::Index cols() const noexcept { return data_.cols(); }

  auto values() const { return data_.topRows(rows_); }

  /// Column holding `attr` (space index), or -1 for non-subject attributes.
  Eigen::Index column_of(std::uint32_t attr) const;
  std::uint32_t attr_of(Eigen::Index column) const { return col_attr_.at(column); }

  void append_row(std::span<const KeyId> keys);

  /// Rows whose pairs are a superset of `keys`.
  std::vector<std::uint32_t> superset_rows(std::span<const KeyId> keys) const;
  Eigen::Index superset_count(std::span<const KeyId> keys) const;

  /// Row counts per value of one column, -1 bucket excluded.
  Eigen::VectorXi value_counts(Eigen::Index column, Eigen::Index domain_size) const;

 private:
  Eigen::Array<bool, Eigen::Dynamic, 1> superset_mask(std::span<const KeyId> keys) const;

  Storage data_;
  Eigen::Index rows_ = 0;
  std::vector<std::uint32_t> col_attr_;
  std::vector<Eigen::Index> attr_col_;
};

class Registry {
 public:
  Registry() = default;
  explicit Registry(AttributeSpace space);

  const AttributeSpace& space() const noexcept { return space_; }
  const SubjectMatrix& matrix() const noexcept { return matrix_; }

  /// Ids default to "s<n>" with n the 1-based registration index.
  std::string register_subject(std::vector<AVPair> pairs, const crypto::PublicKey& pk,
                               std::optional<std::string> id = std::nullopt);
  void register_object(std::string id, std::vector<AVPair> pairs);

  std::size_t subject_count() const noexcept { return subjects_.size(); }
  std::size_t object_count() const noexcept { return objects_.size(); }
  const std::vector<SubjectRecord>& subjects() const noexcept { return subjects_; }
  const std::vector<ObjectRecord>& objects() const noexcept { return objects_; }

  const SubjectRecord& subject(std::string_view id) const;
  std::optional<std::uint32_t> subject_index(std::string_view id) const;
  std::optional<std::uint32_t> subject_by_pk(const crypto::PublicKey& pk) const;
  const ObjectRecord* find_object(std::string_view id) const;

  Credential derive_credential(std::string_view subject_id,
                               const std::vector<std::string>& names) const;

  /// Converts pairs to KeyIds, throwing on unknown attributes or values.
  std::vector<KeyId> keys(std::span<const AVPair> pairs) const;

  std::size_t max_subject_attrs() const noexcept { return max_subject_attrs_; }

  bool operator==(const Registry& o) const;

 private:
  std::vector<AVPair> validate(std::vector<AVPair> pairs, bool subject) const;

  AttributeSpace space_;
  SubjectMatrix matrix_;
  std::vector<SubjectRecord> subjects_;
  std::vector<ObjectRecord> objects_;
  std::unordered_map<std::string, std::uint32_t> subject_ids_;
  std::unordered_map<std::string, std::uint32_t> object_ids_;
  std::map<crypto::PublicKey, std::uint32_t> by_pk_;
  std::size_t max_subject_attrs_ = 0;
};

struct UsageEntry {
  std::string subject;
  std::uint64_t seq = 0;

  bool operator==(const UsageEntry&) const = default;
};

/// Append-only simulated ledger of requests and decisions.
class Ledger {
 public:
  void append(HistoryRecord record);

  std::size_t size() const noexcept { return records_.size(); }
  const std::vector<HistoryRecord>& records() const noexcept { return records_; }
  std::uint64_t last_seq() const noexcept { return last_seq_; }

  /// Records whose credential equals `c` as a set, in seq order. Forged
  /// requests (bad-signature) are kept in the log but never count as usage.
  std::vector<UsageEntry> query_by_credential(const Credential& c) const;

  /// Per-subject usage counts for `c`.
  std::map<std::string, std::uint64_t> usage_counts(const Credential& c) const;

  bool operator==(const Ledger& o) const { return records_ == o.records_; }

 private:
  std::vector<HistoryRecord> records_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> by_credential_;
  std::uint64_t last_seq_ = 0;
};

/// Registry plus ledger, the unit of persistence.
struct State {
  Registry registry;
  Ledger ledger;
};

void snapshot(const State& state, const std::string& path);
State load(const std::string& path);

}  // namespace qae
