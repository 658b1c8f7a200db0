#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qae/model.hpp"

namespace qae {

struct CaseSpec {
  std::string name;
  std::uint64_t n_subjects = 0;
  std::uint64_t n_objects = 0;
  std::uint64_t n_requests = 0;
  std::uint64_t n_policies = 0;
  std::uint32_t value_range = 0;
  std::uint32_t n_subject_attrs = 0;
  std::uint32_t n_object_attrs = 0;

  bool operator==(const CaseSpec&) const = default;
};

/// One of the fifteen benchmark cases C1..C15. Throws Errc::unknown_case.
CaseSpec case_spec(std::string_view name);
const std::vector<CaseSpec>& all_cases();

std::string case_spec_json(const CaseSpec& spec);
CaseSpec case_spec_from_json(std::string_view text);

struct GenOptions {
  double target_match_rate = 0.5;  // subset semantics, over the request stream
  std::uint32_t n_operations = 2;
  // Credential size is drawn uniformly from [min_credential, |s|].
  std::uint32_t min_credential = 1;
};

struct Workload {
  CaseSpec spec;  // unscaled
  std::uint64_t seed = 0;
  double scale = 1.0;
  GenOptions options;

  Registry registry;
  std::vector<std::string> subject_seeds;  // base64 keypair seeds by subject row
  std::vector<PolicyRule> policies;
  std::vector<AccessRequest> requests;

  std::uint64_t n_subjects() const { return registry.subject_count(); }
  std::uint64_t n_objects() const { return registry.object_count(); }
};

/// max(guard, round(scale * count)).
std::uint64_t scaled_count(std::uint64_t count, double scale, std::uint64_t guard);

/// Deterministic in (spec, seed, scale, options). Throws Errc::invalid_argument
/// when scale is outside (0, 1].
Workload generate(const CaseSpec& spec, std::uint64_t seed, double scale,
                  const GenOptions& options = {});

/// Fraction of requests that some rule admits under subset semantics.
double subset_match_rate(const Workload& w);

/// space.json, population.jsonl, policies.json, requests.jsonl, keys.jsonl,
/// manifest.json.
void write_workload(const Workload& w, const std::string& dir);
Workload read_workload(const std::string& dir);

}  // namespace qae
