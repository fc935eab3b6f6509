#pragma once

#include <stdexcept>
#include <string>

namespace ktk {

// Every failure the library can report. The CLI maps these onto exit codes,
// tests match on them, and messages carry the offending index/file/parameter.
enum class errc {
  dimension_mismatch,
  domain_violation,
  invalid_spec,
  invalid_distance_matrix,
  nonpositive_diagonal,
  not_positive_definite,
  not_symmetric,
  no_convergence,
  no_positive_spectrum,
  too_many_landmarks,
  nonpositive_eigenvalue,
  index_out_of_range,
  order_mismatch,
  too_few_samples,
  shape_mismatch,
  version_mismatch,
  corrupt_model,
  parse_error,
  io_error,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
  throw Error(code, message);
}

// Re-throws with context appended, without doubling the name prefix.
[[noreturn]] inline void fail_context(const Error& e, const std::string& context) {
  std::string message = e.what();
  const std::string prefix = std::string(errc_name(e.code())) + ": ";
  if (message.rfind(prefix, 0) == 0) message.erase(0, prefix.size());
  throw Error(e.code(), message + context);
}

}  // namespace ktk
