#include "ehs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ehs/error.hpp"
#include "ehs/fpca.hpp"
#include "parallel.hpp"

namespace ehs {

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

double pearson_r(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(Errc::length_mismatch, "pearson_r: inputs differ in length");
  if (a.size() < 3) fail(Errc::too_few_points, "pearson_r needs at least 3 pairs");
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) fail(Errc::zero_variance, "pearson_r: an input has zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) fail(Errc::empty_data, "quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

DistributionSummary describe_distribution(std::span<const double> values) {
  if (values.empty()) fail(Errc::empty_data, "cannot describe an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  DistributionSummary d;
  d.n = sorted.size();
  d.min = sorted.front();
  d.max = sorted.back();
  d.q1 = quantile_sorted(sorted, 0.25);
  d.median = quantile_sorted(sorted, 0.5);
  d.q3 = quantile_sorted(sorted, 0.75);

  if (d.n >= 3) {
    const double m = mean_of(sorted);
    double m2 = 0.0, m3 = 0.0;
    for (double x : sorted) {
      const double dx = x - m;
      m2 += dx * dx;
      m3 += dx * dx * dx;
    }
    const double n = static_cast<double>(d.n);
    m2 /= n;
    m3 /= n;
    if (m2 > 0.0) {
      const double g1 = m3 / std::pow(m2, 1.5);
      d.skewness = g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
    }
  }
  return d;
}

double silverman_bandwidth(std::span<const double> values) {
  if (values.size() < 2) fail(Errc::zero_spread, "bandwidth needs at least 2 values");
  const double sd = sample_sd(values);
  if (!(sd > 0.0)) fail(Errc::zero_spread, "bandwidth undefined for zero spread");
  return 1.06 * sd * std::pow(static_cast<double>(values.size()), -0.2);
}

std::vector<double> kde_density(std::span<const double> values, std::span<const double> eval_points) {
  const double h = silverman_bandwidth(values);
  const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> out(eval_points.size());
  for (std::size_t k = 0; k < eval_points.size(); ++k) {
    double acc = 0.0;
    for (double v : values) {
      const double z = (eval_points[k] - v) / h;
      acc += std::exp(-0.5 * z * z);
    }
    out[k] = acc * norm;
  }
  return out;
}

SymmetryReport symmetry_check(std::span<const GazeShift> signed_shifts, const SymmetryConfig& cfg) {
  if (!(cfg.bin_width > 0.0)) fail(Errc::invalid_argument, "bin width must be positive");
  const auto n_bins = static_cast<std::size_t>(std::ceil(cfg.max_ecc_deg / cfg.bin_width)) + 1;
  std::vector<double> sum_left(n_bins, 0.0), sum_right(n_bins, 0.0);
  std::vector<std::size_t> cnt_left(n_bins, 0), cnt_right(n_bins, 0);

  SymmetryReport report;
  for (const auto& s : signed_shifts) {
    const double ax = std::abs(s.x);
    if (ax > cfg.max_ecc_deg) continue;
    const auto bin = std::min(static_cast<std::size_t>(std::floor(ax / cfg.bin_width)), n_bins - 1);
    if (s.x < 0.0) {
      sum_left[bin] += -s.y;
      ++cnt_left[bin];
      ++report.n_left;
    } else if (s.x > 0.0) {
      sum_right[bin] += s.y;
      ++cnt_right[bin];
      ++report.n_right;
    }
  }
  if (report.n_left == 0 || report.n_right == 0) {
    fail(Errc::one_sided_data, "symmetry check needs shifts in both directions");
  }

  std::vector<double> left, right;
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (cnt_left[b] < cfg.min_per_bin || cnt_right[b] < cfg.min_per_bin) continue;
    left.push_back(sum_left[b] / static_cast<double>(cnt_left[b]));
    right.push_back(sum_right[b] / static_cast<double>(cnt_right[b]));
  }
  report.n_bins = left.size();
  if (left.size() < 3) fail(Errc::too_few_points, "symmetry check needs 3 bins populated on both sides");

  report.mirror_correlation = pearson_r(left, right);
  double diff = 0.0;
  for (std::size_t i = 0; i < left.size(); ++i) diff += std::abs(left[i] - right[i]);
  const double mean_right = mean_of(right);
  if (!(mean_right > 0.0)) fail(Errc::zero_variance, "rightward head amplitudes average to zero");
  report.normalized_difference = (diff / static_cast<double>(left.size())) / mean_right;
  return report;
}

std::vector<SensitivityResult> threshold_sensitivity(std::span<const ParticipantTrials> participants,
                                                     const SensitivityConfig& cfg) {
  const auto grid = eccentricity_grid();
  std::vector<double> thresholds{cfg.base_threshold};
  thresholds.insert(thresholds.end(), cfg.thresholds.begin(), cfg.thresholds.end());

  // One task per (participant, threshold); curves land in fixed slots.
  const std::size_t n_thr = thresholds.size();
  std::vector<std::optional<std::vector<double>>> curves(participants.size() * n_thr);
  detail::parallel_for(curves.size(), cfg.threads, [&](std::size_t task) {
    const auto& participant = participants[task / n_thr];
    PreprocessConfig pc = cfg.preprocess;
    pc.events.fixation.threshold_deg_s = thresholds[task % n_thr];
    const auto outcome = preprocess_participant(participant, pc);
    if (outcome.shifts.empty()) return;
    const auto fit = fit_participant(outcome.shifts, ModelKind::soft_hinge, cfg.fit);
    curves[task] = eval_on_grid(fit.params, grid);
  });

  std::vector<SensitivityResult> out;
  for (std::size_t p = 0; p < participants.size(); ++p) {
    SensitivityResult res;
    res.participant_id = participants[p].participant_id;
    const auto& base = curves[p * n_thr];
    for (std::size_t t = 1; t < n_thr; ++t) {
      ThresholdCorrelation tc;
      tc.threshold = thresholds[t];
      const auto& alt = curves[p * n_thr + t];
      if (base && alt) {
        try {
          tc.r = pearson_r(*base, *alt);
        } catch (const Error& e) {
          if (e.code() != Errc::zero_variance) throw;
        }
      }
      res.correlations.push_back(tc);
    }
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace ehs
