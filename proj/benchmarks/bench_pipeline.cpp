#include <benchmark/benchmark.h>

#include "ehs/events.hpp"
#include "ehs/fitting.hpp"
#include "ehs/fpca.hpp"
#include "ehs/ingest.hpp"
#include "ehs/synth.hpp"

namespace {

ehs::ShiftSet shifts(std::size_t n) {
  ehs::SynthConfig cfg;
  cfg.n_shifts = n;
  cfg.noise_sd = 2.0;
  cfg.seed = 1;
  return ehs::synth_shifts(cfg).shifts;
}

void BM_FitParticipantSoftHinge(benchmark::State& state) {
  const auto data = shifts(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ehs::fit_participant(data, ehs::ModelKind::soft_hinge));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitParticipantSoftHinge)->Arg(100)->Arg(400)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FitParticipantHinge(benchmark::State& state) {
  const auto data = shifts(400);
  for (auto _ : state) benchmark::DoNotOptimize(ehs::fit_participant(data, ehs::ModelKind::hinge));
}
BENCHMARK(BM_FitParticipantHinge)->Unit(benchmark::kMillisecond);

void BM_FitFpca(benchmark::State& state) {
  ehs::SynthRng rng(3);
  std::vector<ehs::LabelledParams> fits;
  for (int64_t i = 0; i < state.range(0); ++i) {
    fits.push_back({std::to_string(i),
                    ehs::SoftHingeParams{rng.uniform(0.3, 1.0), rng.uniform(5.0, 35.0), rng.uniform(1.0, 10.0)}});
  }
  const auto curves = ehs::sample_curves(fits);
  for (auto _ : state) benchmark::DoNotOptimize(ehs::fit_fpca(curves, 2));
}
BENCHMARK(BM_FitFpca)->Arg(28)->Arg(80)->Arg(500);

struct TraceData {
  std::vector<double> t;
  std::vector<double> yaw;
};

TraceData trace_data() {
  ehs::SynthConfig cfg;
  cfg.n_shifts = 24;
  cfg.trace.gaze_noise_sd = 0.05;
  const auto s = ehs::synth_trace(cfg);
  TraceData d;
  for (const auto& x : s.gaze.samples) {
    d.t.push_back(x.t);
    d.yaw.push_back(x.yaw);
  }
  return d;
}

void BM_OneEuroZeroPhase(benchmark::State& state) {
  const auto d = trace_data();
  for (auto _ : state) benchmark::DoNotOptimize(ehs::one_euro_filter_zero_phase(d.t, d.yaw));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(d.t.size()));
}
BENCHMARK(BM_OneEuroZeroPhase);

void BM_DetectFixations(benchmark::State& state) {
  const auto d = trace_data();
  const auto v = ehs::angular_velocity(d.t, ehs::one_euro_filter_zero_phase(d.t, d.yaw));
  for (auto _ : state) benchmark::DoNotOptimize(ehs::detect_fixations(d.t, v));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(d.t.size()));
}
BENCHMARK(BM_DetectFixations);

void BM_TrialShifts(benchmark::State& state) {
  ehs::SynthConfig cfg;
  cfg.n_shifts = 24;
  cfg.trace.gaze_noise_sd = 0.05;
  const auto s = ehs::synth_trace(cfg);
  for (auto _ : state) {
    const auto trace = ehs::align_head_to_gaze(s.gaze, s.head);
    benchmark::DoNotOptimize(ehs::trial_shifts(trace, {}));
  }
}
BENCHMARK(BM_TrialShifts);

}  // namespace

BENCHMARK_MAIN();
