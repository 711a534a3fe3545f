#include "ehs/fpca.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "ehs/error.hpp"

namespace ehs {

std::vector<double> eccentricity_grid() {
  std::vector<double> grid(kGridSize);
  for (std::size_t i = 0; i < kGridSize; ++i) grid[i] = static_cast<double>(i);
  return grid;
}

std::vector<double> SpectrumModel::reference_pc1() const {
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto& row : scores) {
    if (!row.empty()) out.push_back(row.front());
  }
  return out;
}

CurveGrid sample_curves(std::span<const LabelledParams> fits) {
  const auto grid = eccentricity_grid();
  return sample_curves(fits, grid);
}

CurveGrid sample_curves(std::span<const LabelledParams> fits, std::span<const double> grid) {
  if (fits.empty()) fail(Errc::empty_data, "no fitted curves to sample");
  CurveGrid out;
  out.grid.assign(grid.begin(), grid.end());
  for (const auto& f : fits) {
    out.values.push_back(eval_on_grid(f.params, grid));
    out.curve_ids.push_back(f.id);
  }
  return out;
}

SpectrumModel fit_fpca(const CurveGrid& curves, std::size_t n_components) {
  const std::size_t n = curves.n_curves();
  const std::size_t g = curves.grid.size();
  if (n < 2) fail(Errc::too_few_curves, "fPCA needs at least 2 curves, got " + std::to_string(n));
  if (n_components < 1 || n_components > std::min(n - 1, g)) {
    fail(Errc::invalid_argument, "n_components must be in [1, min(n-1, grid size)]");
  }

  Eigen::MatrixXd x(n, g);
  for (std::size_t i = 0; i < n; ++i) {
    if (curves.values[i].size() != g) fail(Errc::grid_mismatch, "curve " + std::to_string(i) + " is off-grid");
    for (std::size_t j = 0; j < g; ++j) {
      const double v = curves.values[i][j];
      if (!std::isfinite(v)) fail(Errc::invalid_argument, "curve " + std::to_string(i) + " has non-finite values");
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }

  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centred = x.rowwise() - mean;
  const Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) fail(Errc::invalid_argument, "covariance eigendecomposition failed");

  SpectrumModel model;
  model.grid = curves.grid;
  model.curve_ids = curves.curve_ids;
  model.mean_curve.assign(mean.data(), mean.data() + g);
  model.total_variance = cov.trace();

  // Eigen orders eigenvalues ascending.
  const auto& evals = solver.eigenvalues();
  const auto& evecs = solver.eigenvectors();
  for (std::size_t c = 0; c < n_components; ++c) {
    const auto col = static_cast<Eigen::Index>(g - 1 - c);
    Eigen::VectorXd phi = evecs.col(col);
    if (c == 0) {
      if (phi.sum() < 0.0) phi = -phi;
    } else {
      Eigen::Index arg = 0;
      phi.cwiseAbs().maxCoeff(&arg);
      if (phi(arg) < 0.0) phi = -phi;
    }
    const double lambda = std::max(evals(col), 0.0);
    model.components.emplace_back(phi.data(), phi.data() + g);
    model.eigenvalues.push_back(lambda);
    model.explained_ratio.push_back(model.total_variance > 0.0 ? lambda / model.total_variance : 0.0);
  }

  model.scores.assign(n, std::vector<double>(n_components));
  for (std::size_t c = 0; c < n_components; ++c) {
    const Eigen::Map<const Eigen::VectorXd> phi(model.components[c].data(), static_cast<Eigen::Index>(g));
    const Eigen::VectorXd s = centred * phi;
    for (std::size_t i = 0; i < n; ++i) model.scores[i][c] = s(static_cast<Eigen::Index>(i));
  }
  return model;
}

SpectrumScore project_curve(std::span<const double> curve, const SpectrumModel& model, const std::string& curve_id) {
  if (curve.size() != model.grid.size() || model.mean_curve.size() != model.grid.size()) {
    fail(Errc::grid_mismatch, "curve has " + std::to_string(curve.size()) + " points, spectrum grid has " +
                                  std::to_string(model.grid.size()));
  }
  SpectrumScore out;
  out.curve_id = curve_id;
  for (const auto& phi : model.components) {
    double acc = 0.0;
    for (std::size_t j = 0; j < curve.size(); ++j) acc += (curve[j] - model.mean_curve[j]) * phi[j];
    out.pc_scores.push_back(acc);
  }
  const auto reference = model.reference_pc1();
  if (!out.pc_scores.empty() && !reference.empty()) {
    out.percentile_pc1 = score_percentile(out.pc_scores.front(), reference);
  }
  return out;
}

std::vector<double> reconstruct_mode(const SpectrumModel& model, std::size_t component, double c) {
  if (component >= model.n_components()) {
    fail(Errc::index_out_of_range, "component " + std::to_string(component) + " not retained");
  }
  const double scale = c * std::sqrt(model.eigenvalues[component]);
  std::vector<double> out(model.mean_curve);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += scale * model.components[component][j];
  return out;
}

double score_percentile(double score, std::span<const double> reference) {
  if (reference.empty()) fail(Errc::empty_reference, "percentile needs a non-empty reference set");
  std::vector<double> sorted(reference.begin(), reference.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (score < sorted.front()) return 0.0;
  if (score > sorted.back()) return 100.0;
  if (n == 1) return 50.0;

  const auto lo = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), score) - sorted.begin());
  const auto hi = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), score) - sorted.begin());
  double rank;
  if (lo < hi) {
    rank = 0.5 * static_cast<double>(lo + hi - 1);
  } else {
    const double a = sorted[lo - 1];
    const double b = sorted[lo];
    rank = static_cast<double>(lo - 1) + (score - a) / (b - a);
  }
  return 100.0 * rank / static_cast<double>(n - 1);
}

nlohmann::ordered_json spectrum_to_json(const SpectrumModel& m) {
  nlohmann::ordered_json j;
  j["grid"] = m.grid;
  j["mean_curve"] = m.mean_curve;
  j["components"] = m.components;
  j["eigenvalues"] = m.eigenvalues;
  j["explained_ratio"] = m.explained_ratio;
  j["sign_convention"] = m.sign_convention;
  j["total_variance"] = m.total_variance;
  j["curve_ids"] = m.curve_ids;
  j["scores"] = m.scores;
  return j;
}

SpectrumModel spectrum_from_json(const nlohmann::json& j) {
  SpectrumModel m;
  try {
    m.grid = j.at("grid").get<std::vector<double>>();
    m.mean_curve = j.at("mean_curve").get<std::vector<double>>();
    m.components = j.at("components").get<std::vector<std::vector<double>>>();
    m.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    m.explained_ratio = j.at("explained_ratio").get<std::vector<double>>();
    m.sign_convention = j.value("sign_convention", m.sign_convention);
    m.total_variance = j.value("total_variance", 0.0);
    m.curve_ids = j.value("curve_ids", std::vector<std::string>{});
    m.scores = j.value("scores", std::vector<std::vector<double>>{});
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("spectrum model: ") + e.what());
  }
  if (m.mean_curve.size() != m.grid.size()) fail(Errc::grid_mismatch, "spectrum mean curve is off-grid");
  for (const auto& c : m.components) {
    if (c.size() != m.grid.size()) fail(Errc::grid_mismatch, "spectrum component is off-grid");
  }
  if (m.eigenvalues.size() != m.components.size()) fail(Errc::parse_error, "spectrum eigenvalue count mismatch");
  return m;
}

}  // namespace ehs
