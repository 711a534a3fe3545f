#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ehs/events.hpp"
#include "ehs/models.hpp"

namespace ehs {

struct Interval {
  double low = 0.0;
  double high = 0.0;

  bool contains(double v) const noexcept { return v >= low && v <= high; }
};

/// Box constraints for the optimised curve parameters.
struct FitBounds {
  Interval beta{0.0, 1.0};
  Interval tau{-20.0, 70.0};
  Interval s{kSoftnessMin, std::numeric_limits<double>::infinity()};
};

/// Region the random initialisations are drawn from (uniformly, then clipped to the bounds).
struct StartRegion {
  Interval beta{0.0, 1.0};
  Interval tau{0.0, 50.0};
  Interval s{0.5, 20.0};
};

struct FitConfig {
  std::size_t n_starts = 20;
  std::uint64_t seed = 0;
  int max_iters = 200;
  double tol_grad = 1e-8;
  double tol_step = 1e-10;
  FitBounds bounds;
  StartRegion starts;
};

struct FitMetrics {
  double sse = 0.0;
  std::optional<double> r2;  // empty when the observations have zero variance
  double rmse = 0.0;
  double aic = 0.0;
  std::size_t n_points = 0;
  int k = 0;
};

struct FitResult {
  std::string participant_id;
  ModelParams params;
  double sse = 0.0;
  std::optional<double> r2;
  double rmse = 0.0;
  double aic = 0.0;
  std::size_t n_points = 0;
  int n_params_k = 0;
  bool converged = false;
  std::size_t start_index = 0;
  int iterations = 0;
  double initial_sse = 0.0;
  // Final SSE of every local run, in start order (multi-start fits only).
  std::vector<double> start_sse;
  std::uint64_t data_digest = 0;

  ModelKind model() const noexcept { return kind_of(params); }
};

/// Identifies a ShiftSet's contents; results fitted to the same data share it.
std::uint64_t shift_digest(const ShiftSet& data) noexcept;

/// sse, R^2, RMSE and AIC = n ln(sse/n) + 2k, with sse/n floored at 1e-300.
FitMetrics fit_metrics(const ShiftSet& data, const ModelParams& params, int k);

/// Single local run of projected Levenberg-Marquardt from `start` (hinge or soft hinge).
/// A run that stops at max_iters is still returned, with converged=false.
FitResult fit_bounded_least_squares(const ShiftSet& data, const ModelParams& start, const FitConfig& cfg = {});

/// Multi-start fit for the hinge family; the linear baseline is computed from EOR and EHR slope.
FitResult fit_participant(const ShiftSet& data, ModelKind kind, const FitConfig& cfg = {});

/// Independent per-participant fits on up to `threads` workers. Output order follows input order.
std::vector<FitResult> fit_many(std::span<const ShiftSet> sets, ModelKind kind, const FitConfig& cfg = {},
                                unsigned threads = 1);

/// The random initial point of one start. Depends only on (seed, participant, start index).
SoftHingeParams random_start(const FitConfig& cfg, const std::string& participant_id, std::size_t start_index);

/// Models ordered best first: lower AIC, then fewer parameters, then lower RMSE.
std::vector<ModelKind> compare_models(const std::map<ModelKind, FitResult>& results);

nlohmann::ordered_json fit_result_to_json(const FitResult& result);
FitResult fit_result_from_json(const nlohmann::json& j);

}  // namespace ehs
