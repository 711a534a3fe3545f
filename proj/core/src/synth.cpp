#include "ehs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ehs/error.hpp"
#include "ehs/hash.hpp"

namespace ehs {

namespace {

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

void validate(const SynthConfig& cfg) {
  if (cfg.n_shifts < 1) fail(Errc::invalid_argument, "n_shifts must be at least 1");
  if (!(cfg.noise_sd >= 0.0)) fail(Errc::invalid_argument, "noise_sd must be non-negative");
  if (!(cfg.params.s > 0.0)) fail(Errc::invalid_argument, "softness must be positive");
}

// Raised-cosine position profile: 0 at u=0, 1 at u=1, zero velocity at both ends.
double ramp(double u) { return 0.5 * (1.0 - std::cos(std::numbers::pi * std::clamp(u, 0.0, 1.0))); }

}  // namespace

// xoshiro256** seeded through splitmix64.
SynthRng::SynthRng(std::uint64_t seed) {
  std::uint64_t s = seed;
  for (auto& word : state_) {
    s += 0x9e3779b97f4a7c15ULL;
    word = splitmix64(s);
  }
}

std::uint64_t SynthRng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double SynthRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double SynthRng::normal(double mean, double sd) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + sd * spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
}

SynthShifts synth_shifts(const SynthConfig& cfg) {
  validate(cfg);
  SynthRng rng(cfg.seed);
  SynthShifts out;
  out.truth = cfg.params;
  out.shifts.participant_id = cfg.participant_id;

  constexpr std::size_t kBins = 10;
  const double bin_width = kDomainMaxDeg / kBins;
  for (std::size_t i = 0; i < cfg.n_shifts; ++i) {
    double x;
    if (cfg.ecc_distribution == EccDistribution::bin_balanced) {
      const double low = static_cast<double>(i % kBins) * bin_width;
      x = rng.uniform(low, low + bin_width);
    } else {
      x = rng.uniform(kDomainMinDeg, kDomainMaxDeg);
    }
    double y = eval_model_unchecked(cfg.params, x);
    if (cfg.noise_sd > 0.0) y += rng.normal(0.0, cfg.noise_sd);
    y = std::clamp(y, 0.0, x);

    GazeShift s;
    s.x = x;
    s.y = y;
    s.participant_id = cfg.participant_id;
    s.trial_id = cfg.trial_id;
    out.shifts.shifts.push_back(std::move(s));
  }
  out.shifts.cleaning.n_input = cfg.n_shifts;
  return out;
}

SynthTrace synth_trace(const SynthConfig& cfg) {
  validate(cfg);
  const auto& opt = cfg.trace;
  if (!(opt.sample_rate_hz > 0.0) || !(opt.head_rate_hz > 0.0) || !(opt.fixation_duration_ms > 0.0) ||
      !(opt.shift_duration_ms > 0.0) || !(opt.min_ecc_deg <= opt.max_ecc_deg)) {
    fail(Errc::invalid_argument, "invalid trace options");
  }
  SynthRng rng(cfg.seed);
  SynthTrace out;
  out.truth = cfg.params;

  const double fix = opt.fixation_duration_ms * 1e-3;
  const double dur = opt.shift_duration_ms * 1e-3;
  const std::size_t n = cfg.n_shifts;

  // Plateau levels: gaze[k], head[k] for k = 0..n.
  std::vector<double> gaze_level{0.0}, head_level{0.0};
  for (std::size_t k = 0; k < n; ++k) {
    const double x = rng.uniform(opt.min_ecc_deg, opt.max_ecc_deg);
    double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    if (std::abs(gaze_level.back() + sign * x) > opt.max_abs_yaw_deg) sign = -sign;
    const double y = std::clamp(eval_model_unchecked(cfg.params, x), 0.0, x);
    gaze_level.push_back(gaze_level.back() + sign * x);
    head_level.push_back(head_level.back() + sign * y);

    GazeShift s;
    s.x = sign * x;
    s.y = sign * y;
    s.direction = static_cast<int>(sign);
    s.participant_id = cfg.participant_id;
    s.trial_id = cfg.trial_id;
    out.true_shifts.push_back(std::move(s));
  }
  for (std::size_t k = 0; k <= n; ++k) {
    FixationEvent e;
    e.start = static_cast<double>(k) * (fix + dur);
    e.end = e.start + fix;
    out.true_fixations.push_back(e);
  }

  const double total = static_cast<double>(n + 1) * fix + static_cast<double>(n) * dur;
  auto position = [&](const std::vector<double>& level, double t) {
    const double period = fix + dur;
    const auto k = static_cast<std::size_t>(std::min(std::floor(t / period), static_cast<double>(n)));
    const double local = t - static_cast<double>(k) * period;
    if (local <= fix || k == n) return level[k];
    return level[k] + (level[k + 1] - level[k]) * ramp((local - fix) / dur);
  };

  auto make_stream = [&](StreamKind kind, double rate, const std::vector<double>& level, double noise) {
    RawStream s;
    s.kind = kind;
    s.participant_id = cfg.participant_id;
    s.trial_id = cfg.trial_id;
    const auto count = static_cast<std::size_t>(std::floor(total * rate + 1e-9)) + 1;
    s.samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double t = static_cast<double>(i) / rate;
      double yaw = position(level, t);
      if (noise > 0.0) yaw += rng.normal(0.0, noise);
      s.samples.push_back({t, yaw});
    }
    return s;
  };
  out.gaze = make_stream(StreamKind::gaze, opt.sample_rate_hz, gaze_level, opt.gaze_noise_sd);
  out.head = make_stream(StreamKind::head, opt.head_rate_hz, head_level, opt.head_noise_sd);
  return out;
}

nlohmann::ordered_json ground_truth_json(const SynthTrace& trace) {
  nlohmann::ordered_json j;
  j["participant_id"] = trace.gaze.participant_id;
  j["trial_id"] = trace.gaze.trial_id;
  j["params"] = params_to_json(trace.truth);
  auto& fixations = j["fixations"] = nlohmann::ordered_json::array();
  for (const auto& f : trace.true_fixations) fixations.push_back({{"start", f.start}, {"end", f.end}});
  auto& shifts = j["shifts"] = nlohmann::ordered_json::array();
  for (const auto& s : trace.true_shifts) shifts.push_back({{"x_deg", s.x}, {"y_deg", s.y}});
  return j;
}

}  // namespace ehs
