#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ehs {

enum class Errc {
  missing_column,
  non_monotonic_time,
  empty_file,
  parse_error,
  inconsistent_ids,
  no_overlap,
  too_few_samples,
  too_few_fixations,
  domain_error,
  too_few_points,
  empty_data,
  zero_variance,
  mismatched_data,
  too_few_curves,
  grid_mismatch,
  index_out_of_range,
  empty_reference,
  length_mismatch,
  zero_spread,
  one_sided_data,
  invalid_argument,
  io_error,
  usage_error,
  missing_input,
};

/// Stable snake_case identifier, used in machine-readable error output.
std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace ehs
