#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "ehs/fitting.hpp"
#include "ehs/pipeline.hpp"

namespace ehs::cli {

/// Every tunable of the pipeline, flat. Resolution order: built-in defaults, then the
/// `--config` file, then explicit command-line flags.
struct PipelineConfig {
  // events
  double fix_threshold = 15.0;
  double min_dur_ms = 60.0;
  double pad_ms = 10.0;
  double merge_gap_ms = 20.0;
  double max_ecc_deg = 50.0;
  double min_cutoff = 1.0;
  double filter_beta = 0.0;
  double derivative_cutoff = 1.0;
  bool causal_filter = false;
  // ingest
  double min_overlap_s = 25.0;
  double max_gap_s = 0.5;
  std::uint64_t expected_trials = 30;
  // fitting
  std::uint64_t starts = 20;
  std::uint64_t seed = 0;
  int max_iters = 200;
  double tol_grad = 1e-8;
  double tol_step = 1e-10;
  // fpca
  std::uint64_t components = 2;
  // execution
  unsigned threads = 1;

  PreprocessConfig preprocess() const;
  FitConfig fit() const;
};

nlohmann::ordered_json to_json(const PipelineConfig& cfg);
/// Applies the keys of a flat JSON object; unknown keys or wrongly typed values are usage errors.
void apply_json(PipelineConfig& cfg, const nlohmann::json& flat);
/// Copies a single key's value from `src` into `dst`.
void copy_key(PipelineConfig& dst, const PipelineConfig& src, const std::string& key);
/// Digest of the canonical JSON form.
std::string config_hash(const PipelineConfig& cfg);

}  // namespace ehs::cli
