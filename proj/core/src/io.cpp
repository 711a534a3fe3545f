#include "ehs/io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "csv.hpp"
#include "ehs/error.hpp"

namespace ehs {

void write_shifts_csv(std::ostream& out, std::span<const ShiftSet> sets) {
  out << kShiftCsvHeader << '\n';
  for (const auto& set : sets) {
    for (const auto& s : set.shifts) {
      out << detail::csv_field(set.participant_id) << ',' << detail::csv_field(s.trial_id) << ','
          << detail::format_double(s.x) << ',' << detail::format_double(s.y) << '\n';
    }
  }
}

std::vector<ShiftSet> read_shifts_csv(std::istream& in, const std::string& source_name) {
  std::vector<ShiftSet> sets;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  int col_pid = -1, col_trial = -1, col_x = -1, col_y = -1;
  std::size_t n_cols = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto fields = detail::split_csv_line(trimmed);
    const auto where = source_name + ":" + std::to_string(line_no);
    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto name = detail::trim(fields[i]);
        if (name == "participant_id") col_pid = static_cast<int>(i);
        else if (name == "trial_id") col_trial = static_cast<int>(i);
        else if (name == "x_deg") col_x = static_cast<int>(i);
        else if (name == "y_deg") col_y = static_cast<int>(i);
      }
      const std::pair<int, const char*> required[] = {
          {col_pid, "participant_id"}, {col_trial, "trial_id"}, {col_x, "x_deg"}, {col_y, "y_deg"}};
      for (const auto& [col, name] : required) {
        if (col < 0) fail(Errc::missing_column, where + ": missing column '" + name + "'");
      }
      n_cols = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != n_cols) fail(Errc::parse_error, where + ": wrong field count");
    const auto x = detail::parse_double(fields[col_x]);
    const auto y = detail::parse_double(fields[col_y]);
    if (!x || !y) fail(Errc::parse_error, where + ": bad number");

    GazeShift s;
    s.participant_id = std::string(detail::trim(fields[col_pid]));
    s.trial_id = std::string(detail::trim(fields[col_trial]));
    s.x = *x;
    s.y = *y;
    auto [it, inserted] = index.try_emplace(s.participant_id, sets.size());
    if (inserted) {
      sets.emplace_back();
      sets.back().participant_id = s.participant_id;
    }
    sets[it->second].shifts.push_back(std::move(s));
  }
  if (!have_header) fail(Errc::empty_file, source_name + ": no header");
  return sets;
}

void write_grid_csv(std::ostream& out, const ModelParams& params, std::span<const double> grid) {
  out << "x_deg,y_deg\n";
  for (double x : grid) {
    out << detail::format_double(x) << ',' << detail::format_double(eval_model_unchecked(params, x)) << '\n';
  }
}

std::vector<FitResult> fits_from_json(const nlohmann::json& j) {
  const nlohmann::json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("fits")) fail(Errc::parse_error, "fits file has no 'fits' array");
    arr = &j.at("fits");
  }
  if (!arr->is_array()) fail(Errc::parse_error, "fits file is not an array");
  std::vector<FitResult> out;
  for (const auto& item : *arr) out.push_back(fit_result_from_json(item));
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, path.filename().string() + ": " + e.what());
  }
}

}  // namespace ehs
