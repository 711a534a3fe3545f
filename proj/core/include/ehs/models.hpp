#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ehs/events.hpp"

namespace ehs {

inline constexpr double kDomainMinDeg = 0.0;
inline constexpr double kDomainMaxDeg = 50.0;
inline constexpr double kSoftnessMin = 1e-3;

/// Eye-only range followed by a linear rise: gamma * max(0, x - alpha).
struct LinearParams {
  double alpha = 0.0;
  double gamma = 0.0;
};

/// beta * softplus(x - tau); the soft hinge with unit softness.
struct HingeParams {
  double beta = 0.0;
  double tau = 0.0;
};

/// beta * softplus((x - tau) / s). Slope tends to beta / s for large x.
struct SoftHingeParams {
  double beta = 0.0;
  double tau = 0.0;
  double s = 1.0;
};

using ModelParams = std::variant<LinearParams, HingeParams, SoftHingeParams>;

enum class ModelKind { linear, hinge, soft_hinge };

std::string_view to_string(ModelKind kind) noexcept;
/// Accepts "linear", "hinge", "soft-hinge" (and "soft_hinge").
ModelKind parse_model_kind(std::string_view name);
ModelKind kind_of(const ModelParams& params) noexcept;
/// Number of curve parameters, as used by the AIC penalty.
int parameter_count(ModelKind kind) noexcept;

/// log(1 + e^z) without overflow.
double softplus(double z) noexcept;
double logistic(double z) noexcept;

/// Evaluates the model at x; throws domain_error outside [0, 50] degrees.
double eval_model(const ModelParams& params, double x);
/// Same as eval_model, without the domain check.
double eval_model_unchecked(const ModelParams& params, double x) noexcept;

/// Partial derivatives (d/dbeta, d/dtau, d/ds) of the soft hinge at x.
std::array<double, 3> model_gradient(const SoftHingeParams& params, double x) noexcept;
/// Partial derivatives (d/dbeta, d/dtau) of the hinge at x.
std::array<double, 2> model_gradient(const HingeParams& params, double x) noexcept;

/// Eye-only criterion for a single shift: head moved no more than 10% of the gaze amplitude.
inline bool is_eye_only(const GazeShift& s) noexcept { return s.y <= 0.1 * s.x; }

/// Eccentricity where the binned eye-only probability first drops below one half.
/// Bins are centred on multiples of bin_width; the crossing is interpolated between
/// adjacent non-empty bin centres and clamped to [0, 50].
double compute_eor(const ShiftSet& shifts, double bin_width = 5.0);

/// Through-origin least-squares slope of y against (x - alpha) over shifts with x > alpha.
double compute_ehr_slope(const ShiftSet& shifts, double alpha);

nlohmann::ordered_json params_to_json(const ModelParams& params);
ModelParams params_from_json(const nlohmann::json& j);

/// Model values on an arbitrary grid, unchecked domain.
std::vector<double> eval_on_grid(const ModelParams& params, std::span<const double> grid);

}  // namespace ehs
