#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ehs/events.hpp"
#include "ehs/fitting.hpp"
#include "ehs/models.hpp"

namespace ehs {

inline constexpr const char* kShiftCsvHeader = "participant_id,trial_id,x_deg,y_deg";

void write_shifts_csv(std::ostream& out, std::span<const ShiftSet> sets);
/// Groups rows by participant, in order of first appearance. Lines starting with '#' are skipped.
std::vector<ShiftSet> read_shifts_csv(std::istream& in, const std::string& source_name = "<stream>");

/// `x_deg,y_deg` rows of a model evaluated on a grid.
void write_grid_csv(std::ostream& out, const ModelParams& params, std::span<const double> grid);

/// Accepts a bare JSON array of fit objects, or an object holding it under "fits".
std::vector<FitResult> fits_from_json(const nlohmann::json& j);

std::string read_text_file(const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace ehs
