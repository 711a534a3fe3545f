#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ehs/models.hpp"

namespace ehs {

inline constexpr std::size_t kGridSize = 51;

/// The common eccentricity grid: 0..50 degrees in 1 degree steps.
std::vector<double> eccentricity_grid();

struct CurveGrid {
  std::vector<double> grid;
  std::vector<std::vector<double>> values;  // one row per curve, grid.size() columns
  std::vector<std::string> curve_ids;

  std::size_t n_curves() const noexcept { return values.size(); }
};

struct LabelledParams {
  std::string id;
  ModelParams params;
};

/// Functional PCA of a set of curves on a shared grid.
///
/// Components are unit-norm eigenvectors of the pointwise sample covariance (divisor n - 1),
/// ordered by decreasing eigenvalue. The first component is oriented so that its mean
/// loading over the grid is non-negative, i.e. a positive score means more head
/// contribution than average. Further components put their largest-magnitude loading
/// on the positive side.
struct SpectrumModel {
  std::vector<double> grid;
  std::vector<double> mean_curve;
  std::vector<std::vector<double>> components;  // m rows of grid.size() loadings
  std::vector<double> eigenvalues;              // m, non-increasing, >= 0
  std::vector<double> explained_ratio;          // eigenvalue / total variance
  double total_variance = 0.0;                  // trace of the sample covariance
  std::vector<std::vector<double>> scores;      // n rows of m scores
  std::vector<std::string> curve_ids;
  std::string sign_convention = "pc1_mean_loading_nonnegative";

  std::size_t n_components() const noexcept { return components.size(); }
  /// PC1 scores of the training curves, the reference set for percentiles.
  std::vector<double> reference_pc1() const;
};

struct SpectrumScore {
  std::string curve_id;
  std::vector<double> pc_scores;
  double percentile_pc1 = 0.0;
};

CurveGrid sample_curves(std::span<const LabelledParams> fits);
CurveGrid sample_curves(std::span<const LabelledParams> fits, std::span<const double> grid);

SpectrumModel fit_fpca(const CurveGrid& curves, std::size_t n_components = 2);

/// Scores of a curve sampled on the model grid; percentile against the training PC1 scores.
SpectrumScore project_curve(std::span<const double> curve, const SpectrumModel& model,
                            const std::string& curve_id = {});

/// mean + c * sqrt(lambda_j) * phi_j.
std::vector<double> reconstruct_mode(const SpectrumModel& model, std::size_t component, double c);

/// Percentile rank (0..100) of `score`, the inverse of linear-interpolated order-statistic quantiles.
double score_percentile(double score, std::span<const double> reference);

nlohmann::ordered_json spectrum_to_json(const SpectrumModel& model);
SpectrumModel spectrum_from_json(const nlohmann::json& j);

}  // namespace ehs
