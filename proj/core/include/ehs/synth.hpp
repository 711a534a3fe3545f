#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ehs/events.hpp"
#include "ehs/ingest.hpp"
#include "ehs/models.hpp"

namespace ehs {

enum class EccDistribution { uniform, bin_balanced };

/// Shape of generated raw traces: stationary plateaus joined by raised-cosine ramps.
struct TraceOptions {
  double fixation_duration_ms = 1200.0;
  double shift_duration_ms = 80.0;
  double sample_rate_hz = 120.0;
  double head_rate_hz = 90.0;
  double gaze_noise_sd = 0.0;
  double head_noise_sd = 0.0;
  // Shift amplitudes are drawn from [min_ecc_deg, max_ecc_deg].
  double min_ecc_deg = 8.0;
  double max_ecc_deg = 50.0;
  // Direction is chosen so gaze stays within +-max_abs_yaw_deg.
  double max_abs_yaw_deg = 60.0;
};

struct SynthConfig {
  SoftHingeParams params{0.8, 18.0, 6.0};
  std::size_t n_shifts = 100;
  double noise_sd = 0.0;
  EccDistribution ecc_distribution = EccDistribution::uniform;
  std::uint64_t seed = 0;
  std::string participant_id = "S01";
  std::string trial_id = "T01";
  TraceOptions trace;
};

struct SynthShifts {
  ShiftSet shifts;
  SoftHingeParams truth;
};

struct SynthTrace {
  RawStream gaze;
  RawStream head;
  std::vector<FixationEvent> true_fixations;  // plateau intervals
  std::vector<GazeShift> true_shifts;         // signed, one per ramp
  SoftHingeParams truth;
};

/// (x, y) pairs on the curve plus Gaussian noise, y clipped to [0, x].
SynthShifts synth_shifts(const SynthConfig& cfg);

/// Gaze and head streams with n_shifts ramps between n_shifts + 1 plateaus. Head ramps move
/// by the model's head contribution in the gaze direction, on the same timing as the gaze.
SynthTrace synth_trace(const SynthConfig& cfg);

nlohmann::ordered_json ground_truth_json(const SynthTrace& trace);

/// Seeded generator with platform-independent uniform and normal draws.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed);
  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double low, double high) { return low + (high - low) * uniform(); }
  double normal(double mean, double sd);

 private:
  std::uint64_t state_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ehs
