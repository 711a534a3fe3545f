#include "ehs/models.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "ehs/error.hpp"

namespace ehs {

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::linear: return "linear";
    case ModelKind::hinge: return "hinge";
    case ModelKind::soft_hinge: return "soft-hinge";
  }
  return "soft-hinge";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "linear") return ModelKind::linear;
  if (name == "hinge") return ModelKind::hinge;
  if (name == "soft-hinge" || name == "soft_hinge") return ModelKind::soft_hinge;
  fail(Errc::invalid_argument, "unknown model '" + std::string(name) + "'");
}

ModelKind kind_of(const ModelParams& params) noexcept {
  return static_cast<ModelKind>(params.index());
}

int parameter_count(ModelKind kind) noexcept { return kind == ModelKind::soft_hinge ? 3 : 2; }

double softplus(double z) noexcept {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double logistic(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double eval_model_unchecked(const ModelParams& params, double x) noexcept {
  struct Visitor {
    double x;
    double operator()(const LinearParams& p) const { return p.gamma * std::max(0.0, x - p.alpha); }
    double operator()(const HingeParams& p) const { return p.beta * softplus(x - p.tau); }
    double operator()(const SoftHingeParams& p) const { return p.beta * softplus((x - p.tau) / p.s); }
  };
  return std::visit(Visitor{x}, params);
}

double eval_model(const ModelParams& params, double x) {
  if (!(x >= kDomainMinDeg && x <= kDomainMaxDeg)) {
    fail(Errc::domain_error, "eccentricity " + std::to_string(x) + " outside [0, 50] degrees");
  }
  return eval_model_unchecked(params, x);
}

std::array<double, 3> model_gradient(const SoftHingeParams& p, double x) noexcept {
  const double u = (x - p.tau) / p.s;
  const double sig = logistic(u);
  return {softplus(u), -(p.beta / p.s) * sig, -(p.beta * u / p.s) * sig};
}

std::array<double, 2> model_gradient(const HingeParams& p, double x) noexcept {
  const double u = x - p.tau;
  return {softplus(u), -p.beta * logistic(u)};
}

double compute_eor(const ShiftSet& shifts, double bin_width) {
  if (shifts.empty()) fail(Errc::empty_data, "EOR needs at least one shift");
  if (!(bin_width > 0.0)) fail(Errc::invalid_argument, "bin width must be positive");

  const auto n_bins = static_cast<std::size_t>(std::floor(kDomainMaxDeg / bin_width + 0.5)) + 1;
  std::vector<std::size_t> total(n_bins, 0), eye_only(n_bins, 0);
  for (const auto& s : shifts.shifts) {
    const double k = std::floor(s.x / bin_width + 0.5);
    const auto bin = static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(n_bins - 1)));
    ++total[bin];
    if (is_eye_only(s)) ++eye_only[bin];
  }

  std::optional<std::pair<double, double>> prev;  // (centre, probability)
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (total[b] == 0) continue;
    const double centre = static_cast<double>(b) * bin_width;
    const double p = static_cast<double>(eye_only[b]) / static_cast<double>(total[b]);
    if (p < 0.5) {
      if (!prev) return kDomainMinDeg;
      const auto [c0, p0] = *prev;
      const double crossing = c0 + (p0 - 0.5) / (p0 - p) * (centre - c0);
      return std::clamp(crossing, kDomainMinDeg, kDomainMaxDeg);
    }
    prev = {centre, p};
  }
  return kDomainMaxDeg;
}

double compute_ehr_slope(const ShiftSet& shifts, double alpha) {
  double num = 0.0, den = 0.0;
  std::size_t n = 0;
  for (const auto& s : shifts.shifts) {
    if (!(s.x > alpha)) continue;
    const double d = s.x - alpha;
    num += s.y * d;
    den += d * d;
    ++n;
  }
  if (n < 2) {
    fail(Errc::too_few_points, "EHR slope needs 2 shifts beyond alpha=" + std::to_string(alpha) + ", got " +
                                   std::to_string(n));
  }
  return num / den;
}

nlohmann::ordered_json params_to_json(const ModelParams& params) {
  nlohmann::ordered_json j;
  j["model"] = std::string(to_string(kind_of(params)));
  std::visit(
      [&j](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinearParams>) {
          j["alpha"] = p.alpha;
          j["gamma"] = p.gamma;
        } else if constexpr (std::is_same_v<T, HingeParams>) {
          j["beta"] = p.beta;
          j["tau"] = p.tau;
        } else {
          j["beta"] = p.beta;
          j["tau"] = p.tau;
          j["s"] = p.s;
        }
      },
      params);
  return j;
}

ModelParams params_from_json(const nlohmann::json& j) {
  try {
    switch (parse_model_kind(j.at("model").get<std::string>())) {
      case ModelKind::linear: return LinearParams{j.at("alpha").get<double>(), j.at("gamma").get<double>()};
      case ModelKind::hinge: return HingeParams{j.at("beta").get<double>(), j.at("tau").get<double>()};
      case ModelKind::soft_hinge:
        return SoftHingeParams{j.at("beta").get<double>(), j.at("tau").get<double>(), j.at("s").get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("model parameters: ") + e.what());
  }
  fail(Errc::parse_error, "model parameters: unknown model");
}

std::vector<double> eval_on_grid(const ModelParams& params, std::span<const double> grid) {
  std::vector<double> out(grid.size());
  std::transform(grid.begin(), grid.end(), out.begin(),
                 [&params](double x) { return eval_model_unchecked(params, x); });
  return out;
}

}  // namespace ehs
