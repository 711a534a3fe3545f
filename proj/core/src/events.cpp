#include "ehs/events.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ehs/error.hpp"

namespace ehs {

namespace {

void check_series(std::span<const double> t, std::span<const double> values) {
  if (t.size() != values.size()) {
    fail(Errc::length_mismatch, "timestamps and values differ in length");
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      fail(Errc::non_monotonic_time, "timestamp at index " + std::to_string(i) + " does not increase");
    }
  }
}

double smoothing_factor(double period, double cutoff) {
  const double tau = 1.0 / (2.0 * std::numbers::pi * cutoff);
  return 1.0 / (1.0 + tau / period);
}

}  // namespace

std::vector<double> one_euro_filter(std::span<const double> t, std::span<const double> values,
                                    const FilterConfig& cfg) {
  if (!(cfg.min_cutoff > 0.0) || !(cfg.beta >= 0.0) || !(cfg.derivative_cutoff > 0.0)) {
    fail(Errc::invalid_argument, "1-Euro filter needs min_cutoff > 0, beta >= 0, derivative_cutoff > 0");
  }
  check_series(t, values);
  std::vector<double> out(values.size());
  if (values.empty()) return out;

  double x_hat = values[0];
  double dx_hat = 0.0;
  out[0] = x_hat;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double period = t[i] - t[i - 1];
    const double dx = (values[i] - values[i - 1]) / period;
    const double a_d = smoothing_factor(period, cfg.derivative_cutoff);
    dx_hat = a_d * dx + (1.0 - a_d) * dx_hat;
    const double cutoff = cfg.min_cutoff + cfg.beta * std::abs(dx_hat);
    const double a = smoothing_factor(period, cutoff);
    x_hat = a * values[i] + (1.0 - a) * x_hat;
    out[i] = x_hat;
  }
  return out;
}

std::vector<double> one_euro_filter_zero_phase(std::span<const double> t, std::span<const double> values,
                                               const FilterConfig& cfg) {
  auto forward = one_euro_filter(t, values, cfg);
  // Reversed time axis, negated so it still increases.
  std::vector<double> rt(t.rbegin(), t.rend());
  for (auto& v : rt) v = -v;
  std::reverse(forward.begin(), forward.end());
  auto backward = one_euro_filter(rt, forward, cfg);
  std::reverse(backward.begin(), backward.end());
  return backward;
}

std::vector<double> angular_velocity(std::span<const double> t, std::span<const double> yaw) {
  if (yaw.size() < 2) fail(Errc::too_few_samples, "velocity needs at least 2 samples");
  check_series(t, yaw);
  const std::size_t n = yaw.size();
  std::vector<double> v(n);
  v[0] = (yaw[1] - yaw[0]) / (t[1] - t[0]);
  v[n - 1] = (yaw[n - 1] - yaw[n - 2]) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    v[i] = (yaw[i + 1] - yaw[i - 1]) / (t[i + 1] - t[i - 1]);
  }
  return v;
}

std::vector<FixationEvent> detect_fixations(std::span<const double> t, std::span<const double> velocity,
                                            const FixationConfig& cfg) {
  check_series(t, velocity);
  std::vector<FixationEvent> events;
  if (t.empty()) return events;

  const double min_dur = cfg.min_duration_ms * 1e-3;
  const double pad = cfg.pad_ms * 1e-3;
  const double merge_gap = cfg.merge_gap_ms * 1e-3;
  // Sample times carry rounding noise; durations are compared with a nanosecond slack.
  constexpr double kSlack = 1e-9;

  std::vector<FixationEvent> candidates;
  const std::size_t n = t.size();
  std::size_t i = 0;
  while (i < n) {
    if (!(std::abs(velocity[i]) < cfg.threshold_deg_s)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && std::abs(velocity[j + 1]) < cfg.threshold_deg_s) ++j;
    if (t[j] - t[i] + kSlack >= min_dur) {
      FixationEvent e;
      e.start = std::max(t.front(), t[i] - pad);
      e.end = std::min(t.back(), t[j] + pad);
      candidates.push_back(e);
    }
    i = j + 1;
  }

  for (const auto& c : candidates) {
    if (!events.empty() && c.start - events.back().end < merge_gap) {
      events.back().end = std::max(events.back().end, c.end);
    } else {
      events.push_back(c);
    }
  }

  for (auto& e : events) {
    e.first_index = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), e.start) - t.begin());
    e.last_index = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), e.end) - t.begin()) - 1;
  }
  return events;
}

std::vector<GazeShift> extract_shifts(const Trace& trace, std::span<const FixationEvent> fixations) {
  if (fixations.size() < 2) fail(Errc::too_few_fixations, "trial " + trace.trial_id + ": need 2 fixations");
  std::vector<GazeShift> shifts;
  shifts.reserve(fixations.size() - 1);
  for (std::size_t k = 0; k + 1 < fixations.size(); ++k) {
    const std::size_t a = fixations[k].last_index;
    const std::size_t b = fixations[k + 1].first_index;
    if (a >= trace.size() || b >= trace.size()) {
      fail(Errc::index_out_of_range, "fixation does not belong to trial " + trace.trial_id);
    }
    GazeShift s;
    s.x = trace.gaze_yaw[b] - trace.gaze_yaw[a];
    s.y = trace.head_yaw[b] - trace.head_yaw[a];
    s.direction = s.x < 0.0 ? -1 : 1;
    s.participant_id = trace.participant_id;
    s.trial_id = trace.trial_id;
    shifts.push_back(std::move(s));
  }
  return shifts;
}

ShiftSet symmetrize_and_clean(std::span<const GazeShift> shifts, double max_ecc_deg) {
  ShiftSet set;
  set.provenance.max_ecc_deg = max_ecc_deg;
  set.cleaning.n_input = shifts.size();
  if (!shifts.empty()) set.participant_id = shifts.front().participant_id;

  for (const auto& raw : shifts) {
    GazeShift s = raw;
    const double sign = raw.x < 0.0 ? -1.0 : 1.0;
    s.direction = static_cast<int>(sign);
    s.x = std::abs(raw.x);
    s.y = sign * raw.y;
    if (s.y < 0.0) {
      s.y = 0.0;
      ++set.cleaning.n_clamped;
    }
    if (s.x > max_ecc_deg) {
      ++set.cleaning.n_removed_eccentricity;
      continue;
    }
    if (s.y > s.x) {
      ++set.cleaning.n_removed_outlier;
      continue;
    }
    set.shifts.push_back(std::move(s));
  }
  return set;
}

std::vector<FixationEvent> segment_trace(const Trace& trace, const EventConfig& cfg) {
  if (trace.size() < 2) return {};
  const auto smoothed = cfg.zero_phase ? one_euro_filter_zero_phase(trace.timestamps, trace.gaze_yaw, cfg.filter)
                                       : one_euro_filter(trace.timestamps, trace.gaze_yaw, cfg.filter);
  const auto velocity = angular_velocity(trace.timestamps, smoothed);
  return detect_fixations(trace.timestamps, velocity, cfg.fixation);
}

std::vector<GazeShift> trial_shifts(const Trace& trace, const EventConfig& cfg) {
  const auto fixations = segment_trace(trace, cfg);
  if (fixations.size() < 2) return {};
  return extract_shifts(trace, fixations);
}

}  // namespace ehs
