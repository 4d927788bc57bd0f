#ifndef NETPSY_ERRORS_HPP
#define NETPSY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace netpsy {

// Machine-readable error codes. Split into two families: validation errors
// (bad inputs, schema violations, precondition failures) and numeric errors
// (well-formed inputs on which the requested computation is not defined).
// The CLI maps the families to distinct exit codes.
enum class Errc {
  // validation
  invalid_argument,
  dimension_mismatch,
  missing_column,
  non_numeric_cell,
  duplicate_time_index,
  all_missing_item,
  too_many_variables,
  too_many_factors,
  insufficient_observations,
  missing_values,
  domain_error,
  unknown_key,
  io_error,
  // numeric
  not_positive_definite,
  not_psd_after_shift,
  singular_i_minus_omega,
  singular_i_minus_b,
  collinear_predictors,
  unstable_model,
  unachievable,
};

const char* errc_name(Errc code);

// True for codes that indicate a numeric failure on otherwise valid input.
bool errc_is_numeric(Errc code);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace netpsy

#endif
