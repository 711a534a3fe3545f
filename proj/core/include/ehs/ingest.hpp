#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ehs {

enum class StreamKind { gaze, head };

struct Sample {
  double t = 0.0;    // seconds
  double yaw = 0.0;  // degrees
};

/// One recorded yaw stream of a single trial, timestamps strictly increasing.
struct RawStream {
  std::vector<Sample> samples;
  StreamKind kind = StreamKind::gaze;
  std::string participant_id;
  std::string trial_id;
};

/// Gaze and head yaw on the gaze clock, restricted to the overlap of both streams.
struct Trace {
  std::vector<double> timestamps;
  std::vector<double> gaze_yaw;
  std::vector<double> head_yaw;
  std::string participant_id;
  std::string trial_id;
  double overlap_seconds = 0.0;
  // Largest sampling gap of either source stream inside the overlap window.
  double source_gap_max_seconds = 0.0;

  std::size_t size() const noexcept { return timestamps.size(); }
};

enum class SanityReason { none, short_overlap, discontinuity, missing_stream };

struct SanityReport {
  std::string participant_id;
  std::string trial_id;
  double overlap_seconds = 0.0;
  double gap_max_seconds = 0.0;
  bool pass = false;
  SanityReason reason = SanityReason::none;
};

struct SanityConfig {
  double min_overlap_s = 25.0;
  double max_gap_s = 0.5;
  std::size_t expected_trials = 30;
};

struct ParticipantVerdict {
  std::string participant_id;
  std::size_t trials_seen = 0;
  std::size_t trials_passed = 0;
  bool pass = false;
};

inline constexpr const char* kTraceCsvHeader = "participant_id,trial_id,timestamp_s,yaw_deg";

RawStream parse_trace_csv(std::istream& in, StreamKind kind, const std::string& source_name = "<stream>");
RawStream load_trace_csv(const std::filesystem::path& path, StreamKind kind);
void write_trace_csv(std::ostream& out, const RawStream& stream);

/// Cumulative unwrap: any step larger than 180 degrees is folded by a multiple of 360.
std::vector<double> unwrap_degrees(std::span<const double> yaw);

Trace align_head_to_gaze(const RawStream& gaze, const RawStream& head);

SanityReport sanity_check(const Trace& trace, const SanityConfig& cfg = {});
SanityReport missing_stream_report(const std::string& participant_id, const std::string& trial_id);
ParticipantVerdict check_participant(std::span<const SanityReport> reports, const SanityConfig& cfg = {});

std::string_view to_string(SanityReason reason) noexcept;
/// Single-line JSON object, suitable for JSON-lines output.
std::string sanity_report_json(const SanityReport& report);

}  // namespace ehs
