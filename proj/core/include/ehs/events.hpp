#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ehs/ingest.hpp"

namespace ehs {

/// 1-Euro filter parameters. Defaults are the low-jitter setting used for headset gaze.
struct FilterConfig {
  double min_cutoff = 1.0;         // Hz
  double beta = 0.0;               // speed coefficient
  double derivative_cutoff = 1.0;  // Hz
};

struct FixationConfig {
  double threshold_deg_s = 15.0;
  double min_duration_ms = 60.0;
  double pad_ms = 10.0;
  double merge_gap_ms = 20.0;
};

struct FixationEvent {
  double start = 0.0;  // seconds
  double end = 0.0;
  // Sample index range [first_index, last_index] covered by the event.
  std::size_t first_index = 0;
  std::size_t last_index = 0;

  double duration() const noexcept { return end - start; }
};

struct GazeShift {
  double x = 0.0;      // target eccentricity, degrees
  double y = 0.0;      // head contribution, degrees
  int direction = 1;   // sign of the raw gaze displacement
  std::string participant_id;
  std::string trial_id;
};

struct EventConfig {
  FilterConfig filter;
  FixationConfig fixation;
  double max_ecc_deg = 50.0;
  // Run the 1-Euro filter forward and then backward so the smoothed signal has no phase lag.
  bool zero_phase = true;
};

struct CleaningStats {
  std::size_t n_input = 0;
  std::size_t n_clamped = 0;
  std::size_t n_removed_eccentricity = 0;
  std::size_t n_removed_outlier = 0;
};

struct ShiftSet {
  std::string participant_id;
  std::vector<GazeShift> shifts;
  EventConfig provenance;
  CleaningStats cleaning;

  std::size_t size() const noexcept { return shifts.size(); }
  bool empty() const noexcept { return shifts.empty(); }
};

/// Causal 1-Euro filter over a timestamped series. Uses the sample spacing as the period.
std::vector<double> one_euro_filter(std::span<const double> t, std::span<const double> values,
                                    const FilterConfig& cfg = {});

/// Forward pass followed by a reversed pass of the same filter.
std::vector<double> one_euro_filter_zero_phase(std::span<const double> t, std::span<const double> values,
                                               const FilterConfig& cfg = {});

/// Central differences inside, one-sided at the ends. Units: value units per second.
std::vector<double> angular_velocity(std::span<const double> t, std::span<const double> yaw);

std::vector<FixationEvent> detect_fixations(std::span<const double> t, std::span<const double> velocity,
                                            const FixationConfig& cfg = {});

/// One shift per consecutive fixation pair, measured between the last sample of the earlier
/// fixation and the first sample of the later one.
std::vector<GazeShift> extract_shifts(const Trace& trace, std::span<const FixationEvent> fixations);

/// Mirrors leftward shifts, zeroes opposing head motion and drops shifts beyond max_ecc_deg or with y > x.
ShiftSet symmetrize_and_clean(std::span<const GazeShift> shifts, double max_ecc_deg = 50.0);

/// Smoothing, velocity and fixation detection for one aligned trial.
std::vector<FixationEvent> segment_trace(const Trace& trace, const EventConfig& cfg);

/// Full per-trial event pipeline: segmentation followed by shift extraction (signed, uncleaned).
std::vector<GazeShift> trial_shifts(const Trace& trace, const EventConfig& cfg);

}  // namespace ehs
