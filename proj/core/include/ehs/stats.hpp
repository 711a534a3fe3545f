#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ehs/events.hpp"
#include "ehs/fitting.hpp"
#include "ehs/pipeline.hpp"

namespace ehs {

/// Sample Pearson correlation. Needs equal lengths >= 3 and non-zero variance on both sides.
double pearson_r(std::span<const double> a, std::span<const double> b);

/// Quantile by linear interpolation between closest ranks (h = (n - 1) p) of sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

struct DistributionSummary {
  std::size_t n = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  // Adjusted Fisher-Pearson coefficient; empty for n < 3 or zero spread.
  std::optional<double> skewness;
};

DistributionSummary describe_distribution(std::span<const double> values);

/// Silverman's rule: 1.06 * sd * n^(-1/5).
double silverman_bandwidth(std::span<const double> values);

/// Gaussian kernel density estimate at each evaluation point.
std::vector<double> kde_density(std::span<const double> values, std::span<const double> eval_points);

struct SymmetryConfig {
  double bin_width = 5.0;
  std::size_t min_per_bin = 3;
  double max_ecc_deg = 50.0;
};

struct SymmetryReport {
  double mirror_correlation = 0.0;
  double normalized_difference = 0.0;
  std::size_t n_bins = 0;
  std::size_t n_left = 0;
  std::size_t n_right = 0;
};

/// Compares binned mean head amplitudes of mirrored leftward shifts with rightward ones.
SymmetryReport symmetry_check(std::span<const GazeShift> signed_shifts, const SymmetryConfig& cfg = {});

struct SensitivityConfig {
  PreprocessConfig preprocess;
  FitConfig fit;
  double base_threshold = 15.0;
  std::vector<double> thresholds{10.0, 20.0};
  unsigned threads = 1;
};

struct ThresholdCorrelation {
  double threshold = 0.0;
  // Empty when either curve is missing or flat.
  std::optional<double> r;
};

struct SensitivityResult {
  std::string participant_id;
  std::vector<ThresholdCorrelation> correlations;
};

/// Re-runs detection, extraction and the soft-hinge fit per fixation threshold and correlates
/// each participant's curve (on the 0..50 degree grid) with the base-threshold curve.
std::vector<SensitivityResult> threshold_sensitivity(std::span<const ParticipantTrials> participants,
                                                     const SensitivityConfig& cfg = {});

}  // namespace ehs
