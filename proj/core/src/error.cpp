#include "ehs/error.hpp"

namespace ehs {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::missing_column: return "missing_column";
    case Errc::non_monotonic_time: return "non_monotonic_time";
    case Errc::empty_file: return "empty_file";
    case Errc::parse_error: return "parse_error";
    case Errc::inconsistent_ids: return "inconsistent_ids";
    case Errc::no_overlap: return "no_overlap";
    case Errc::too_few_samples: return "too_few_samples";
    case Errc::too_few_fixations: return "too_few_fixations";
    case Errc::domain_error: return "domain_error";
    case Errc::too_few_points: return "too_few_points";
    case Errc::empty_data: return "empty_data";
    case Errc::zero_variance: return "zero_variance";
    case Errc::mismatched_data: return "mismatched_data";
    case Errc::too_few_curves: return "too_few_curves";
    case Errc::grid_mismatch: return "grid_mismatch";
    case Errc::index_out_of_range: return "index_out_of_range";
    case Errc::empty_reference: return "empty_reference";
    case Errc::length_mismatch: return "length_mismatch";
    case Errc::zero_spread: return "zero_spread";
    case Errc::one_sided_data: return "one_sided_data";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::io_error: return "io_error";
    case Errc::usage_error: return "usage_error";
    case Errc::missing_input: return "missing_input";
  }
  return "unknown";
}

}  // namespace ehs
