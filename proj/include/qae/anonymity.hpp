#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qae/model.hpp"

namespace qae {

/// Credential subject space: generators (subjects holding every pair of the
/// credential) united with historical users. Each member carries a usage
/// weight of [generator] + number of recorded uses.
struct SubjectSpace {
  Credential credential;
  std::set<std::string> generators;
  std::set<std::string> historical_users;
  std::map<std::string, std::uint64_t> members;

  std::size_t size() const noexcept { return members.size(); }
};

/// Verifies the signature, then builds the space. Throws
/// Errc::forged_credential on a bad signature and
/// Errc::invalid_configuration when the space is empty.
SubjectSpace build_subject_space(const crypto::SignedCredential& sc, const Registry& registry,
                                 const Ledger& history);

/// Trusted variant used on registry data; no signature step.
SubjectSpace subject_space(const Credential& c, const Registry& registry, const Ledger& history);

double request_entropy(const SubjectSpace& space);

struct RTResult {
  std::size_t t = 0;
  std::vector<std::string> cohort;  // a_t
  std::size_t r = 0;
};

/// (r,t)-anonymity over subjects holding at least t attributes. Throws
/// Errc::empty_cohort when no subject qualifies, Errc::invalid_argument for
/// t == 0.
RTResult rt_anonymity(const Registry& registry, const Ledger& history, std::size_t t);

/// Subject anonymity score, evaluated literally over t = 1..|s|.
double subject_anonymity(std::string_view subject_id, const Registry& registry,
                         const Ledger& history);

/// The score depends on the subject only through |s|; this returns the
/// cumulative score for every |s| in 0..max so reports can share the work.
std::vector<double> subject_anonymity_by_size(const Registry& registry, const Ledger& history);

}  // namespace qae
