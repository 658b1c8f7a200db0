#pragma once

#include <stdexcept>
#include <string>

namespace qae {

enum class Errc {
  duplicate_name,
  empty_domain,
  unknown_class,
  out_of_domain,
  wrong_class,
  duplicate_attribute,
  unknown_attribute,
  unknown_subject,
  unknown_object,
  not_assigned,
  empty_credential,
  non_monotone_seq,
  corrupt_file,
  version_mismatch,
  io_error,
  bad_seed,
  encoding_error,
  forged_credential,
  invalid_configuration,
  empty_cohort,
  invalid_argument,
  unknown_case,
  empty_stream,
  empty_population,
};

const char* to_string(Errc code) noexcept;

// All library failures surface as qae::Error; code() lets callers branch
// without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace qae
