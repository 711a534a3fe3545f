#include "ehs/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "ehs/error.hpp"

namespace ehs {

namespace {

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

}  // namespace

RawStream parse_trace_csv(std::istream& in, StreamKind kind, const std::string& source_name) {
  RawStream stream;
  stream.kind = kind;

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  int col_pid = -1, col_trial = -1, col_t = -1, col_yaw = -1;
  std::size_t n_cols = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;

    const auto fields = detail::split_csv_line(trimmed);
    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto name = detail::trim(fields[i]);
        if (name == "participant_id") col_pid = static_cast<int>(i);
        else if (name == "trial_id") col_trial = static_cast<int>(i);
        else if (name == "timestamp_s") col_t = static_cast<int>(i);
        else if (name == "yaw_deg") col_yaw = static_cast<int>(i);
      }
      const std::pair<int, const char*> required[] = {
          {col_pid, "participant_id"}, {col_trial, "trial_id"}, {col_t, "timestamp_s"}, {col_yaw, "yaw_deg"}};
      for (const auto& [col, name] : required) {
        if (col < 0) fail(Errc::missing_column, where(source_name, line_no) + ": missing column '" + name + "'");
      }
      n_cols = fields.size();
      have_header = true;
      continue;
    }

    if (fields.size() != n_cols) {
      fail(Errc::parse_error, where(source_name, line_no) + ": expected " + std::to_string(n_cols) +
                                  " fields, got " + std::to_string(fields.size()));
    }
    const auto t = detail::parse_double(fields[col_t]);
    if (!t || !std::isfinite(*t)) fail(Errc::parse_error, where(source_name, line_no) + ": bad timestamp_s");
    const auto yaw = detail::parse_double(fields[col_yaw]);
    if (!yaw || !std::isfinite(*yaw)) fail(Errc::parse_error, where(source_name, line_no) + ": bad yaw_deg");

    const std::string pid(detail::trim(fields[col_pid]));
    const std::string trial(detail::trim(fields[col_trial]));
    if (stream.samples.empty()) {
      stream.participant_id = pid;
      stream.trial_id = trial;
    } else if (pid != stream.participant_id || trial != stream.trial_id) {
      fail(Errc::inconsistent_ids, where(source_name, line_no) + ": file mixes participant/trial ids");
    }
    if (!stream.samples.empty() && *t <= stream.samples.back().t) {
      fail(Errc::non_monotonic_time, where(source_name, line_no) + ": timestamp " + detail::format_double(*t) +
                                         " does not increase");
    }
    stream.samples.push_back({*t, *yaw});
  }

  if (!have_header) fail(Errc::empty_file, source_name + ": no header");
  if (stream.samples.empty()) fail(Errc::empty_file, source_name + ": no samples");
  return stream;
}

RawStream load_trace_csv(const std::filesystem::path& path, StreamKind kind) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  return parse_trace_csv(in, kind, path.filename().string());
}

void write_trace_csv(std::ostream& out, const RawStream& stream) {
  out << kTraceCsvHeader << '\n';
  const auto pid = detail::csv_field(stream.participant_id);
  const auto trial = detail::csv_field(stream.trial_id);
  for (const auto& s : stream.samples) {
    out << pid << ',' << trial << ',' << detail::format_double(s.t) << ',' << detail::format_double(s.yaw) << '\n';
  }
}

std::vector<double> unwrap_degrees(std::span<const double> yaw) {
  std::vector<double> out(yaw.begin(), yaw.end());
  double offset = 0.0;
  for (std::size_t i = 1; i < yaw.size(); ++i) {
    const double step = yaw[i] - yaw[i - 1];
    if (step > 180.0) offset -= 360.0 * std::ceil((step - 180.0) / 360.0);
    else if (step < -180.0) offset += 360.0 * std::ceil((-step - 180.0) / 360.0);
    out[i] = yaw[i] + offset;
  }
  return out;
}

Trace align_head_to_gaze(const RawStream& gaze, const RawStream& head) {
  if (gaze.samples.empty() || head.samples.empty()) {
    fail(Errc::no_overlap, "trial " + gaze.trial_id + ": empty stream");
  }
  const double start = std::max(gaze.samples.front().t, head.samples.front().t);
  const double end = std::min(gaze.samples.back().t, head.samples.back().t);
  if (!(end > start)) fail(Errc::no_overlap, "trial " + gaze.trial_id + ": gaze and head share no time window");

  std::vector<double> head_t(head.samples.size());
  std::vector<double> head_raw(head.samples.size());
  for (std::size_t i = 0; i < head.samples.size(); ++i) {
    head_t[i] = head.samples[i].t;
    head_raw[i] = head.samples[i].yaw;
  }
  const auto head_yaw = unwrap_degrees(head_raw);

  Trace trace;
  trace.participant_id = gaze.participant_id;
  trace.trial_id = gaze.trial_id;
  trace.overlap_seconds = end - start;

  std::size_t j = 0;
  for (const auto& g : gaze.samples) {
    if (g.t < start || g.t > end) continue;
    while (j + 1 < head_t.size() && head_t[j + 1] <= g.t) ++j;
    double h;
    if (head_t[j] == g.t) {
      h = head_yaw[j];
    } else {
      const double w = (g.t - head_t[j]) / (head_t[j + 1] - head_t[j]);
      h = head_yaw[j] + w * (head_yaw[j + 1] - head_yaw[j]);
    }
    trace.timestamps.push_back(g.t);
    trace.gaze_yaw.push_back(g.yaw);
    trace.head_yaw.push_back(h);
  }
  if (trace.timestamps.empty()) fail(Errc::no_overlap, "trial " + gaze.trial_id + ": no gaze samples in overlap");

  double gap = 0.0;
  for (std::size_t i = 1; i < trace.timestamps.size(); ++i) {
    gap = std::max(gap, trace.timestamps[i] - trace.timestamps[i - 1]);
  }
  gap = std::max({gap, trace.timestamps.front() - start, end - trace.timestamps.back()});
  for (std::size_t i = 1; i < head_t.size(); ++i) {
    if (head_t[i] <= start || head_t[i - 1] >= end) continue;
    gap = std::max(gap, head_t[i] - head_t[i - 1]);
  }
  trace.source_gap_max_seconds = gap;
  return trace;
}

SanityReport sanity_check(const Trace& trace, const SanityConfig& cfg) {
  SanityReport report;
  report.participant_id = trace.participant_id;
  report.trial_id = trace.trial_id;
  report.overlap_seconds = trace.overlap_seconds;
  report.gap_max_seconds = trace.source_gap_max_seconds;
  if (!(trace.overlap_seconds > cfg.min_overlap_s)) {
    report.reason = SanityReason::short_overlap;
  } else if (trace.source_gap_max_seconds > cfg.max_gap_s) {
    report.reason = SanityReason::discontinuity;
  } else {
    report.pass = true;
  }
  return report;
}

SanityReport missing_stream_report(const std::string& participant_id, const std::string& trial_id) {
  SanityReport report;
  report.participant_id = participant_id;
  report.trial_id = trial_id;
  report.reason = SanityReason::missing_stream;
  return report;
}

ParticipantVerdict check_participant(std::span<const SanityReport> reports, const SanityConfig& cfg) {
  ParticipantVerdict verdict;
  if (!reports.empty()) verdict.participant_id = reports.front().participant_id;
  verdict.trials_seen = reports.size();
  verdict.trials_passed = static_cast<std::size_t>(
      std::count_if(reports.begin(), reports.end(), [](const SanityReport& r) { return r.pass; }));
  verdict.pass = verdict.trials_passed >= cfg.expected_trials;
  return verdict;
}

std::string_view to_string(SanityReason reason) noexcept {
  switch (reason) {
    case SanityReason::none: return "none";
    case SanityReason::short_overlap: return "short_overlap";
    case SanityReason::discontinuity: return "discontinuity";
    case SanityReason::missing_stream: return "missing_stream";
  }
  return "none";
}

std::string sanity_report_json(const SanityReport& report) {
  nlohmann::ordered_json j;
  j["participant_id"] = report.participant_id;
  j["trial_id"] = report.trial_id;
  j["overlap_seconds"] = report.overlap_seconds;
  j["gap_max_seconds"] = report.gap_max_seconds;
  j["verdict"] = report.pass ? "pass" : "fail";
  if (report.pass) j["reason"] = nullptr;
  else j["reason"] = std::string(to_string(report.reason));
  return j.dump();
}

}  // namespace ehs
