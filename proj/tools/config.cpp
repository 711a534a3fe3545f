#include "config.hpp"

#include <variant>

#include "ehs/error.hpp"
#include "ehs/hash.hpp"

namespace ehs::cli {

namespace {

using Member = std::variant<double PipelineConfig::*, bool PipelineConfig::*,
                            std::uint64_t PipelineConfig::*, int PipelineConfig::*, unsigned PipelineConfig::*>;

struct Field {
  const char* key;
  Member member;
};

// Order defines the canonical JSON layout (and therefore the config hash).
const Field kFields[] = {
    {"fix_threshold", &PipelineConfig::fix_threshold},
    {"min_dur_ms", &PipelineConfig::min_dur_ms},
    {"pad_ms", &PipelineConfig::pad_ms},
    {"merge_gap_ms", &PipelineConfig::merge_gap_ms},
    {"max_ecc_deg", &PipelineConfig::max_ecc_deg},
    {"min_cutoff", &PipelineConfig::min_cutoff},
    {"filter_beta", &PipelineConfig::filter_beta},
    {"derivative_cutoff", &PipelineConfig::derivative_cutoff},
    {"causal_filter", &PipelineConfig::causal_filter},
    {"min_overlap_s", &PipelineConfig::min_overlap_s},
    {"max_gap_s", &PipelineConfig::max_gap_s},
    {"expected_trials", &PipelineConfig::expected_trials},
    {"starts", &PipelineConfig::starts},
    {"seed", &PipelineConfig::seed},
    {"max_iters", &PipelineConfig::max_iters},
    {"tol_grad", &PipelineConfig::tol_grad},
    {"tol_step", &PipelineConfig::tol_step},
    {"components", &PipelineConfig::components},
    {"threads", &PipelineConfig::threads},
};

const Field& find_field(const std::string& key) {
  for (const auto& f : kFields) {
    if (key == f.key) return f;
  }
  fail(Errc::usage_error, "unknown config key '" + key + "'");
}

}  // namespace

PreprocessConfig PipelineConfig::preprocess() const {
  PreprocessConfig pc;
  pc.events.filter = {min_cutoff, filter_beta, derivative_cutoff};
  pc.events.fixation = {fix_threshold, min_dur_ms, pad_ms, merge_gap_ms};
  pc.events.max_ecc_deg = max_ecc_deg;
  pc.events.zero_phase = !causal_filter;
  pc.sanity.min_overlap_s = min_overlap_s;
  pc.sanity.max_gap_s = max_gap_s;
  pc.sanity.expected_trials = expected_trials;
  return pc;
}

FitConfig PipelineConfig::fit() const {
  FitConfig fc;
  fc.n_starts = starts;
  fc.seed = seed;
  fc.max_iters = max_iters;
  fc.tol_grad = tol_grad;
  fc.tol_step = tol_step;
  return fc;
}

nlohmann::ordered_json to_json(const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  for (const auto& f : kFields) {
    std::visit([&](auto member) { j[f.key] = cfg.*member; }, f.member);
  }
  return j;
}

void apply_json(PipelineConfig& cfg, const nlohmann::json& flat) {
  if (!flat.is_object()) fail(Errc::usage_error, "config file must hold a flat JSON object");
  for (const auto& [key, value] : flat.items()) {
    const auto& field = find_field(key);
    std::visit(
        [&](auto member) {
          using T = std::decay_t<decltype(cfg.*member)>;
          const bool ok = std::is_same_v<T, bool> ? value.is_boolean()
                          : std::is_floating_point_v<T> ? value.is_number()
                          : value.is_number_unsigned() || (value.is_number_integer() && value.get<long long>() >= 0);
          if (!ok) fail(Errc::usage_error, "config key '" + key + "' has the wrong type");
          cfg.*member = value.get<T>();
        },
        field.member);
  }
}

void copy_key(PipelineConfig& dst, const PipelineConfig& src, const std::string& key) {
  std::visit([&](auto member) { dst.*member = src.*member; }, find_field(key).member);
}

std::string config_hash(const PipelineConfig& cfg) { return hex64(fnv1a(to_json(cfg).dump())); }

}  // namespace ehs::cli
