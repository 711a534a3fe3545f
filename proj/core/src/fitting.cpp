#include "ehs/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "ehs/error.hpp"
#include "ehs/hash.hpp"
#include "parallel.hpp"

namespace ehs {

namespace {

using Vec = std::array<double, 3>;

struct Problem {
  std::span<const GazeShift> data;
  ModelKind kind;
  int k;
  std::array<Interval, 3> bounds;
};

Problem make_problem(const ShiftSet& data, ModelKind kind, const FitConfig& cfg) {
  Problem pb{data.shifts, kind, parameter_count(kind), {cfg.bounds.beta, cfg.bounds.tau, cfg.bounds.s}};
  return pb;
}

ModelParams to_params(ModelKind kind, const Vec& p) {
  if (kind == ModelKind::hinge) return HingeParams{p[0], p[1]};
  return SoftHingeParams{p[0], p[1], p[2]};
}

Vec from_params(const ModelParams& params) {
  if (const auto* h = std::get_if<HingeParams>(&params)) return {h->beta, h->tau, 1.0};
  const auto& s = std::get<SoftHingeParams>(params);
  return {s.beta, s.tau, s.s};
}

double predict(const Problem& pb, const Vec& p, double x) {
  const double scale = pb.kind == ModelKind::hinge ? 1.0 : p[2];
  return p[0] * softplus((x - p[1]) / scale);
}

double sse_at(const Problem& pb, const Vec& p) {
  double sse = 0.0;
  for (const auto& s : pb.data) {
    const double r = s.y - predict(pb, p, s.x);
    sse += r * r;
  }
  return sse;
}

/// Accumulates J^T J and the gradient of SSE/2 (= -J^T r); returns SSE.
double normal_equations(const Problem& pb, const Vec& p, Eigen::Matrix3d& jtj, Eigen::Vector3d& grad) {
  jtj.setZero();
  grad.setZero();
  double sse = 0.0;
  for (const auto& s : pb.data) {
    Eigen::Vector3d j = Eigen::Vector3d::Zero();
    double f;
    if (pb.kind == ModelKind::hinge) {
      const HingeParams h{p[0], p[1]};
      const auto g = model_gradient(h, s.x);
      j << g[0], g[1], 0.0;
      f = h.beta * softplus(s.x - h.tau);
    } else {
      const SoftHingeParams sh{p[0], p[1], p[2]};
      const auto g = model_gradient(sh, s.x);
      j << g[0], g[1], g[2];
      f = sh.beta * softplus((s.x - sh.tau) / sh.s);
    }
    const double r = s.y - f;
    sse += r * r;
    jtj.noalias() += j * j.transpose();
    grad.noalias() -= j * r;
  }
  return sse;
}

double norm(const Vec& v, int k) {
  double acc = 0.0;
  for (int i = 0; i < k; ++i) acc += v[i] * v[i];
  return std::sqrt(acc);
}

struct LocalRun {
  Vec p{};
  double sse = 0.0;
  double initial_sse = 0.0;
  int iterations = 0;
  bool converged = false;
};

LocalRun levenberg_marquardt(const Problem& pb, Vec p, const FitConfig& cfg) {
  const int k = pb.k;
  LocalRun run;
  Eigen::Matrix3d jtj;
  Eigen::Vector3d grad;
  double sse = normal_equations(pb, p, jtj, grad);
  run.initial_sse = sse;
  double lambda = 1e-3;

  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    // Variables pinned at a bound by the gradient are held fixed for this step.
    std::array<bool, 3> free{};
    double pg = 0.0;
    int n_free = 0;
    for (int i = 0; i < k; ++i) {
      const bool at_low = p[i] <= pb.bounds[i].low && grad[i] > 0.0;
      const bool at_high = p[i] >= pb.bounds[i].high && grad[i] < 0.0;
      free[i] = !(at_low || at_high);
      if (free[i]) {
        pg = std::max(pg, std::abs(grad[i]));
        ++n_free;
      }
    }
    if (pg < cfg.tol_grad || n_free == 0) {
      run.converged = true;
      break;
    }

    std::array<int, 3> idx{};
    int m = 0;
    for (int i = 0; i < k; ++i) {
      if (free[i]) idx[m++] = i;
    }
    Eigen::MatrixXd a(m, m);
    Eigen::VectorXd b(m);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) a(r, c) = jtj(idx[r], idx[c]);
      a(r, r) += lambda * std::max(jtj(idx[r], idx[r]), 1e-12);
      b(r) = -grad[idx[r]];
    }
    const Eigen::VectorXd delta = a.ldlt().solve(b);

    Vec trial = p;
    for (int r = 0; r < m; ++r) {
      const int i = idx[r];
      trial[i] = std::clamp(p[i] + delta(r), pb.bounds[i].low, pb.bounds[i].high);
    }
    Vec step{};
    for (int i = 0; i < k; ++i) step[i] = trial[i] - p[i];
    if (!std::isfinite(delta.sum()) || norm(step, k) <= cfg.tol_step * (norm(p, k) + cfg.tol_step)) {
      run.converged = std::isfinite(delta.sum());
      break;
    }

    const double trial_sse = sse_at(pb, trial);
    if (trial_sse < sse) {
      p = trial;
      sse = normal_equations(pb, p, jtj, grad);
      lambda = std::max(lambda * 0.1, 1e-15);
    } else {
      lambda *= 10.0;
      if (lambda > 1e20) {
        run.converged = true;
        break;
      }
    }
  }
  run.iterations = iter;
  run.p = p;
  run.sse = sse;
  return run;
}

FitResult make_result(const ShiftSet& data, const ModelParams& params, const FitMetrics& m) {
  FitResult r;
  r.participant_id = data.participant_id;
  r.params = params;
  r.sse = m.sse;
  r.r2 = m.r2;
  r.rmse = m.rmse;
  r.aic = m.aic;
  r.n_points = m.n_points;
  r.n_params_k = m.k;
  r.data_digest = shift_digest(data);
  return r;
}

void check_start(const Problem& pb, const Vec& p) {
  for (int i = 0; i < pb.k; ++i) {
    if (!pb.bounds[i].contains(p[i])) fail(Errc::invalid_argument, "start point outside parameter bounds");
  }
}

}  // namespace

std::uint64_t shift_digest(const ShiftSet& data) noexcept {
  Fnv1a h;
  h.update(data.participant_id);
  for (const auto& s : data.shifts) {
    h.update_double(s.x);
    h.update_double(s.y);
  }
  return h.value();
}

FitMetrics fit_metrics(const ShiftSet& data, const ModelParams& params, int k) {
  if (data.empty()) fail(Errc::empty_data, "participant " + data.participant_id + ": no shifts");
  FitMetrics m;
  m.n_points = data.size();
  m.k = k;
  double mean = 0.0;
  for (const auto& s : data.shifts) mean += s.y;
  mean /= static_cast<double>(m.n_points);
  double sst = 0.0;
  for (const auto& s : data.shifts) {
    const double r = s.y - eval_model_unchecked(params, s.x);
    m.sse += r * r;
    sst += (s.y - mean) * (s.y - mean);
  }
  const double n = static_cast<double>(m.n_points);
  m.rmse = std::sqrt(m.sse / n);
  m.aic = n * std::log(std::max(m.sse / n, 1e-300)) + 2.0 * k;
  if (sst > 0.0) m.r2 = 1.0 - m.sse / sst;
  return m;
}

FitResult fit_bounded_least_squares(const ShiftSet& data, const ModelParams& start, const FitConfig& cfg) {
  if (data.empty()) fail(Errc::empty_data, "participant " + data.participant_id + ": no shifts");
  const ModelKind kind = kind_of(start);
  if (kind == ModelKind::linear) {
    fail(Errc::invalid_argument, "the linear baseline is computed, not optimised");
  }
  const auto pb = make_problem(data, kind, cfg);
  const Vec p0 = from_params(start);
  check_start(pb, p0);

  const auto run = levenberg_marquardt(pb, p0, cfg);
  const auto params = to_params(kind, run.p);
  auto result = make_result(data, params, fit_metrics(data, params, pb.k));
  result.converged = run.converged;
  result.iterations = run.iterations;
  result.initial_sse = run.initial_sse;
  return result;
}

SoftHingeParams random_start(const FitConfig& cfg, const std::string& participant_id, std::size_t start_index) {
  std::uint64_t state = cfg.seed;
  state ^= splitmix64(fnv1a(participant_id));
  state = splitmix64(state ^ splitmix64(static_cast<std::uint64_t>(start_index) + 1));
  std::mt19937_64 gen(state);
  auto uniform = [&gen](const Interval& iv) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return iv.low + u * (iv.high - iv.low);
  };
  SoftHingeParams p;
  p.beta = std::clamp(uniform(cfg.starts.beta), cfg.bounds.beta.low, cfg.bounds.beta.high);
  p.tau = std::clamp(uniform(cfg.starts.tau), cfg.bounds.tau.low, cfg.bounds.tau.high);
  p.s = std::clamp(uniform(cfg.starts.s), cfg.bounds.s.low, cfg.bounds.s.high);
  return p;
}

FitResult fit_participant(const ShiftSet& data, ModelKind kind, const FitConfig& cfg) {
  if (data.empty()) fail(Errc::empty_data, "participant " + data.participant_id + ": no shifts");
  if (cfg.n_starts < 1) fail(Errc::invalid_argument, "n_starts must be at least 1");

  if (kind == ModelKind::linear) {
    LinearParams lp;
    lp.alpha = compute_eor(data);
    try {
      lp.gamma = compute_ehr_slope(data, lp.alpha);
    } catch (const Error& e) {
      if (e.code() != Errc::too_few_points) throw;
      lp.gamma = 0.0;  // eye-only across the whole domain
    }
    auto result = make_result(data, lp, fit_metrics(data, lp, parameter_count(kind)));
    result.converged = true;
    return result;
  }

  std::optional<FitResult> best;
  std::vector<double> start_sse;
  start_sse.reserve(cfg.n_starts);
  for (std::size_t i = 0; i < cfg.n_starts; ++i) {
    const auto sp = random_start(cfg, data.participant_id, i);
    const ModelParams start = kind == ModelKind::hinge ? ModelParams{HingeParams{sp.beta, sp.tau}} : ModelParams{sp};
    auto r = fit_bounded_least_squares(data, start, cfg);
    r.start_index = i;
    start_sse.push_back(r.sse);
    if (!best || r.sse < best->sse) best = std::move(r);
  }
  best->start_sse = std::move(start_sse);
  return *best;
}

std::vector<FitResult> fit_many(std::span<const ShiftSet> sets, ModelKind kind, const FitConfig& cfg,
                                unsigned threads) {
  std::vector<FitResult> results(sets.size());
  detail::parallel_for(sets.size(), threads, [&](std::size_t i) { results[i] = fit_participant(sets[i], kind, cfg); });
  return results;
}

std::vector<ModelKind> compare_models(const std::map<ModelKind, FitResult>& results) {
  if (results.size() < 2) fail(Errc::invalid_argument, "model comparison needs at least two results");
  const auto digest = results.begin()->second.data_digest;
  const auto n = results.begin()->second.n_points;
  for (const auto& [kind, r] : results) {
    if (r.data_digest != digest || r.n_points != n) {
      fail(Errc::mismatched_data, "results were fitted to different shift sets");
    }
  }
  std::vector<ModelKind> order;
  for (const auto& [kind, r] : results) order.push_back(kind);
  std::stable_sort(order.begin(), order.end(), [&results](ModelKind a, ModelKind b) {
    const auto& ra = results.at(a);
    const auto& rb = results.at(b);
    if (ra.aic != rb.aic) return ra.aic < rb.aic;
    if (ra.n_params_k != rb.n_params_k) return ra.n_params_k < rb.n_params_k;
    return ra.rmse < rb.rmse;
  });
  return order;
}

nlohmann::ordered_json fit_result_to_json(const FitResult& r) {
  nlohmann::ordered_json j;
  j["participant_id"] = r.participant_id;
  j["model"] = std::string(to_string(r.model()));
  j["params"] = params_to_json(r.params);
  j["sse"] = r.sse;
  if (r.r2) j["r2"] = *r.r2;
  else j["r2"] = nullptr;
  j["rmse"] = r.rmse;
  j["aic"] = r.aic;
  j["n_points"] = r.n_points;
  j["n_params_k"] = r.n_params_k;
  j["converged"] = r.converged;
  j["start_index"] = r.start_index;
  j["data_digest"] = hex64(r.data_digest);
  return j;
}

FitResult fit_result_from_json(const nlohmann::json& j) {
  FitResult r;
  try {
    r.participant_id = j.at("participant_id").get<std::string>();
    r.params = params_from_json(j.at("params"));
    r.sse = j.at("sse").get<double>();
    if (!j.at("r2").is_null()) r.r2 = j.at("r2").get<double>();
    r.rmse = j.at("rmse").get<double>();
    r.aic = j.at("aic").get<double>();
    r.n_points = j.at("n_points").get<std::size_t>();
    r.n_params_k = j.value("n_params_k", parameter_count(r.model()));
    r.converged = j.at("converged").get<bool>();
    r.start_index = j.value("start_index", std::size_t{0});
    if (j.contains("data_digest")) r.data_digest = std::stoull(j.at("data_digest").get<std::string>(), nullptr, 16);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("fit result: ") + e.what());
  }
  return r;
}

}  // namespace ehs
