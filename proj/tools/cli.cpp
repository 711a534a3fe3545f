#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "config.hpp"
#include "ehs/error.hpp"
#include "ehs/fpca.hpp"
#include "ehs/hash.hpp"
#include "ehs/io.hpp"
#include "ehs/stats.hpp"
#include "ehs/synth.hpp"
#include "provenance.hpp"
#include "report.hpp"

namespace ehs::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kGazeSuffix = "_gaze.csv";
constexpr const char* kHeadSuffix = "_head.csv";

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(10);
  ss << v;
  return ss.str();
}

/// Flags shared by all subcommands plus the pipeline tunables each one exposes. Values
/// land in `flags`; only the ones actually given override the config file.
class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "Flat JSON file with default settings");
    add("--threads", "threads", &PipelineConfig::threads, "Worker threads");
    add("--seed", "seed", &PipelineConfig::seed, "Master random seed");
  }

  template <typename T>
  void add(const std::string& flag, const std::string& key, T PipelineConfig::*member, const std::string& help) {
    given_.emplace_back(key, app_->add_option(flag, flags_.*member, help));
  }

  void add_flag(const std::string& flag, const std::string& key, bool PipelineConfig::*member, const std::string& help) {
    given_.emplace_back(key, app_->add_flag(flag, flags_.*member, help));
  }

  void add_event_flags() {
    add("--fix-threshold", "fix_threshold", &PipelineConfig::fix_threshold, "Fixation velocity threshold, deg/s");
    add("--min-dur-ms", "min_dur_ms", &PipelineConfig::min_dur_ms, "Minimum fixation duration, ms");
    add("--pad-ms", "pad_ms", &PipelineConfig::pad_ms, "Fixation padding, ms");
    add("--merge-gap-ms", "merge_gap_ms", &PipelineConfig::merge_gap_ms, "Merge fixations closer than this, ms");
    add("--max-ecc-deg", "max_ecc_deg", &PipelineConfig::max_ecc_deg, "Drop shifts larger than this, deg");
    add("--min-cutoff", "min_cutoff", &PipelineConfig::min_cutoff, "1-Euro minimum cutoff, Hz");
    add("--filter-beta", "filter_beta", &PipelineConfig::filter_beta, "1-Euro speed coefficient");
    add("--derivative-cutoff", "derivative_cutoff", &PipelineConfig::derivative_cutoff, "1-Euro derivative cutoff, Hz");
    add_flag("--causal-filter", "causal_filter", &PipelineConfig::causal_filter, "Filter forward only");
    add("--min-overlap-s", "min_overlap_s", &PipelineConfig::min_overlap_s, "Minimum gaze/head overlap, s");
    add("--max-gap-s", "max_gap_s", &PipelineConfig::max_gap_s, "Largest tolerated sampling gap, s");
    add("--expected-trials", "expected_trials", &PipelineConfig::expected_trials, "Valid trials required per participant");
  }

  void add_fit_flags() {
    add("--starts", "starts", &PipelineConfig::starts, "Random initialisations per fit");
    add("--max-iters", "max_iters", &PipelineConfig::max_iters, "Iteration cap per local fit");
    add("--tol-grad", "tol_grad", &PipelineConfig::tol_grad, "Projected gradient tolerance");
    add("--tol-step", "tol_step", &PipelineConfig::tol_step, "Relative step tolerance");
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (!config_path_.empty()) apply_json(cfg, read_json_file(config_path_));
    for (const auto& [key, opt] : given_) {
      if (opt->count() > 0) copy_key(cfg, flags_, key);
    }
    if (cfg.threads < 1) cfg.threads = 1;
    return cfg;
  }

 private:
  CLI::App* app_;
  PipelineConfig flags_;
  std::string config_path_;
  std::vector<std::pair<std::string, CLI::Option*>> given_;
};

std::vector<FitResult> load_fits(const std::string& path) {
  auto fits = fits_from_json(read_json_file(path));
  if (fits.empty()) fail(Errc::missing_input, fs::path(path).filename().string() + ": no fitted participants");
  return fits;
}

nlohmann::ordered_json with_provenance(const Provenance& prov, nlohmann::ordered_json body) {
  nlohmann::ordered_json j;
  j["provenance"] = prov.json();
  for (auto& [k, v] : body.items()) j[k] = std::move(v);
  return j;
}

std::string params_label(std::size_t i, const char* prefix) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02zu", prefix, i + 1);
  return buf;
}

// --- subcommands -----------------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::size_t participants = 8;
  std::size_t trials = 30;
  std::size_t shifts = 24;
  double noise = 0.05;
  double fixation_ms = 1200.0;
  double shift_ms = 80.0;
};

void run_synth(const SynthArgs& a, const PipelineConfig& cfg, std::ostream& out) {
  const fs::path root(a.out);
  Provenance prov("synth", cfg);
  nlohmann::ordered_json truth = nlohmann::ordered_json::array();
  std::vector<ShiftSet> true_sets;

  for (std::size_t p = 0; p < a.participants; ++p) {
    const auto pid = params_label(p, "P");
    SynthRng prng(splitmix64(cfg.seed ^ splitmix64(fnv1a(pid))));
    SoftHingeParams params{prng.uniform(0.6, 1.0), prng.uniform(8.0, 25.0), prng.uniform(2.0, 8.0)};

    nlohmann::ordered_json pj;
    pj["participant_id"] = pid;
    pj["params"] = params_to_json(params);
    auto& trials = pj["trials"] = nlohmann::ordered_json::array();
    std::vector<GazeShift> signed_truth;
    for (std::size_t t = 0; t < a.trials; ++t) {
      SynthConfig sc;
      sc.params = params;
      sc.n_shifts = a.shifts;
      sc.participant_id = pid;
      sc.trial_id = params_label(t, "T");
      sc.seed = splitmix64(splitmix64(cfg.seed ^ fnv1a(pid)) ^ (t + 1));
      sc.trace.gaze_noise_sd = a.noise;
      sc.trace.head_noise_sd = a.noise;
      sc.trace.fixation_duration_ms = a.fixation_ms;
      sc.trace.shift_duration_ms = a.shift_ms;
      const auto trace = synth_trace(sc);

      const auto stem = pid + "_" + sc.trial_id;
      std::ostringstream gaze, head;
      gaze << prov.csv_line();
      write_trace_csv(gaze, trace.gaze);
      head << prov.csv_line();
      write_trace_csv(head, trace.head);
      write_file(root / "traces" / (stem + kGazeSuffix), gaze.str());
      write_file(root / "traces" / (stem + kHeadSuffix), head.str());
      trials.push_back(ground_truth_json(trace));
      signed_truth.insert(signed_truth.end(), trace.true_shifts.begin(), trace.true_shifts.end());
    }
    truth.push_back(std::move(pj));
    auto set = symmetrize_and_clean(signed_truth, cfg.max_ecc_deg);
    set.participant_id = pid;
    true_sets.push_back(std::move(set));
  }

  write_file(root / "ground_truth.json", with_provenance(prov, {{"participants", truth}}).dump(1) + "\n");
  std::ostringstream shifts;
  shifts << prov.csv_line();
  write_shifts_csv(shifts, true_sets);
  write_file(root / "true_shifts.csv", shifts.str());
  out << "synth: " << a.participants << " participants x " << a.trials << " trials written\n";
}

void run_preprocess(const std::string& in, const std::string& out_path, const std::string& sanity_out,
                    const PipelineConfig& cfg, std::ostream& out) {
  const auto participants = load_participants(in);
  if (participants.empty()) fail(Errc::missing_input, "preprocess: no *_gaze.csv / *_head.csv files found");
  const auto outcomes = preprocess_all(participants, cfg.preprocess(), cfg.threads);

  Provenance prov("preprocess", cfg);
  prov.add_input_dir(in);

  std::vector<ShiftSet> kept;
  std::ostringstream sanity;
  sanity << nlohmann::ordered_json{{"provenance", prov.json()}}.dump() << '\n';
  std::size_t n_shifts = 0;
  for (const auto& o : outcomes) {
    for (const auto& r : o.reports) sanity << sanity_report_json(r) << '\n';
    if (o.verdict.pass) {
      n_shifts += o.shifts.size();
      kept.push_back(o.shifts);
    }
  }
  std::ostringstream csv;
  csv << prov.csv_line();
  write_shifts_csv(csv, kept);
  write_file(out_path, csv.str());
  if (!sanity_out.empty()) write_file(sanity_out, sanity.str());
  out << "preprocess: " << kept.size() << "/" << outcomes.size() << " participants passed, " << n_shifts
      << " shifts\n";
}

void run_fit(const std::string& in, const std::string& out_path, const std::string& model, const PipelineConfig& cfg,
             std::ostream& out) {
  std::ifstream file(in);
  if (!file) fail(Errc::io_error, "cannot open " + in);
  auto sets = read_shifts_csv(file, fs::path(in).filename().string());
  sets.erase(std::remove_if(sets.begin(), sets.end(), [](const ShiftSet& s) { return s.empty(); }), sets.end());
  if (sets.empty()) fail(Errc::missing_input, "fit: no participants with shifts");

  std::vector<ModelKind> kinds;
  if (model == "all") kinds = {ModelKind::linear, ModelKind::hinge, ModelKind::soft_hinge};
  else kinds = {parse_model_kind(model)};

  std::vector<std::vector<FitResult>> per_model;
  for (const auto kind : kinds) per_model.push_back(fit_many(sets, kind, cfg.fit(), cfg.threads));

  Provenance prov("fit", cfg);
  prov.add_input(in);
  nlohmann::ordered_json fits = nlohmann::ordered_json::array();
  nlohmann::ordered_json comparison = nlohmann::ordered_json::array();
  for (std::size_t p = 0; p < sets.size(); ++p) {
    std::map<ModelKind, FitResult> by_kind;
    for (std::size_t m = 0; m < kinds.size(); ++m) {
      fits.push_back(fit_result_to_json(per_model[m][p]));
      by_kind.emplace(kinds[m], per_model[m][p]);
    }
    if (by_kind.size() > 1) {
      nlohmann::ordered_json ranking = nlohmann::ordered_json::array();
      for (const auto k : compare_models(by_kind)) ranking.push_back(std::string(to_string(k)));
      comparison.push_back({{"participant_id", sets[p].participant_id}, {"ranking", ranking}});
    }
  }
  nlohmann::ordered_json body{{"fits", fits}};
  if (!comparison.empty()) body["comparison"] = comparison;
  write_file(out_path, with_provenance(prov, body).dump(1) + "\n");
  out << "fit: " << sets.size() << " participants x " << kinds.size() << " models\n";
}

void run_fpca(const std::string& in, const std::string& out_path, const PipelineConfig& cfg, std::ostream& out) {
  const auto fits = load_fits(in);
  const auto curves = soft_hinge_curves(fits);
  if (curves.empty()) fail(Errc::missing_input, "fpca: no soft-hinge fits in " + fs::path(in).filename().string());
  const std::size_t m = std::max<std::size_t>(1, std::min(cfg.components, curves.size() > 1 ? curves.size() - 1 : 1));
  const auto model = fit_fpca(sample_curves(curves), m);

  Provenance prov("fpca", cfg);
  prov.add_input(in);
  write_file(out_path, with_provenance(prov, spectrum_to_json(model)).dump(1) + "\n");
  out << "fpca: " << curves.size() << " curves, PC1 explains " << num(100.0 * model.explained_ratio.front())
      << "%\n";
}

void run_project(const std::string& model_path, const std::string& in, const std::string& out_path,
                 const PipelineConfig& cfg, std::ostream& out) {
  const auto model = spectrum_from_json(read_json_file(model_path));
  const auto fits = load_fits(in);
  const auto curves = soft_hinge_curves(fits);
  if (curves.empty()) fail(Errc::missing_input, "project: no soft-hinge fits");
  const auto sampled = sample_curves(curves, model.grid);

  Provenance prov("project", cfg);
  prov.add_input(model_path);
  prov.add_input(in);
  std::ostringstream csv;
  csv << prov.csv_line() << "curve_id,pc1,pc2,percentile_pc1\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto s = project_curve(sampled.values[i], model, curves[i].id);
    csv << s.curve_id << ',' << num(s.pc_scores.at(0)) << ','
        << (s.pc_scores.size() > 1 ? num(s.pc_scores[1]) : std::string()) << ',' << num(s.percentile_pc1) << '\n';
  }
  write_file(out_path, csv.str());
  out << "project: " << curves.size() << " curves scored\n";
}

void run_report(const std::string& fits_path, const std::string& spectrum_path, const std::string& out_dir,
                const PipelineConfig& cfg, std::ostream& out) {
  const auto fits = load_fits(fits_path);
  Provenance prov("report", cfg);
  prov.add_input(fits_path);
  std::optional<SpectrumModel> spectrum;
  if (!spectrum_path.empty()) {
    spectrum = spectrum_from_json(read_json_file(spectrum_path));
    prov.add_input(spectrum_path);
  }
  const auto files = emit_report(fits, spectrum, out_dir, prov, cfg.components);
  out << "report: " << files.written.size() << " files\n";
}

void run_sensitivity(const std::string& in, const std::string& out_path, double base,
                     const std::vector<double>& thresholds, const PipelineConfig& cfg, std::ostream& out) {
  const auto participants = load_participants(in);
  if (participants.empty()) fail(Errc::missing_input, "sensitivity: no trace files found");
  SensitivityConfig sc;
  sc.preprocess = cfg.preprocess();
  sc.fit = cfg.fit();
  sc.base_threshold = base;
  sc.thresholds = thresholds;
  sc.threads = cfg.threads;
  const auto results = threshold_sensitivity(participants, sc);

  Provenance prov("sensitivity", cfg);
  prov.add_input_dir(in);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::map<double, std::vector<double>> by_threshold;
  for (const auto& r : results) {
    nlohmann::ordered_json cors = nlohmann::ordered_json::array();
    for (const auto& c : r.correlations) {
      cors.push_back({{"threshold", c.threshold}, {"r", c.r ? nlohmann::ordered_json(*c.r) : nlohmann::ordered_json(nullptr)}});
      if (c.r) by_threshold[c.threshold].push_back(*c.r);
    }
    rows.push_back({{"participant_id", r.participant_id}, {"correlations", cors}});
  }
  nlohmann::ordered_json medians = nlohmann::ordered_json::array();
  for (const auto& [thr, rs] : by_threshold) {
    medians.push_back({{"threshold", thr}, {"median_r", describe_distribution(rs).median}, {"n", rs.size()}});
  }
  write_file(out_path,
             with_provenance(prov, {{"base_threshold", base}, {"participants", rows}, {"median", medians}}).dump(1) +
                 "\n");
  out << "sensitivity: " << results.size() << " participants\n";
}

void report_error(std::ostream& err, const std::string& stage, std::string_view code, const std::string& message) {
  err << nlohmann::ordered_json{{"error", code}, {"stage", stage}, {"message", message}}.dump() << '\n';
}

}  // namespace

std::vector<ParticipantTrials> load_participants(const std::string& dir) {
  if (!fs::is_directory(dir)) fail(Errc::missing_input, "not a directory: " + fs::path(dir).filename().string());
  std::map<std::string, std::pair<fs::path, fs::path>> pairs;  // stem -> (gaze, head)
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().string();
    if (ends_with(name, kGazeSuffix)) pairs[name.substr(0, name.size() - 9)].first = entry.path();
    else if (ends_with(name, kHeadSuffix)) pairs[name.substr(0, name.size() - 9)].second = entry.path();
  }

  std::vector<ParticipantTrials> out;
  std::map<std::string, std::size_t> index;
  for (const auto& [stem, files] : pairs) {
    TrialStreams trial;
    if (!files.first.empty()) trial.gaze = load_trace_csv(files.first, StreamKind::gaze);
    if (!files.second.empty()) trial.head = load_trace_csv(files.second, StreamKind::head);
    trial.head.kind = StreamKind::head;
    auto& known = files.first.empty() ? trial.head : trial.gaze;
    auto& other = files.first.empty() ? trial.gaze : trial.head;
    if (other.samples.empty()) {
      other.participant_id = known.participant_id;
      other.trial_id = known.trial_id;
    }
    const auto pid = trial.gaze.participant_id;
    auto [it, inserted] = index.try_emplace(pid, out.size());
    if (inserted) out.push_back({pid, {}});
    out[it->second].trials.push_back(std::move(trial));
  }
  return out;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eye-head coordination modelling and population spectrum"};
  app.name("ehs");
  app.require_subcommand(1, 1);

  auto* synth = app.add_subcommand("synth", "Generate synthetic traces with known ground truth");
  Options synth_opts(synth);
  SynthArgs synth_args;
  synth->add_option("--out", synth_args.out, "Output directory")->required();
  synth->add_option("--participants", synth_args.participants, "Number of participants");
  synth->add_option("--trials", synth_args.trials, "Trials per participant");
  synth->add_option("--shifts", synth_args.shifts, "Gaze shifts per trial");
  synth->add_option("--noise", synth_args.noise, "Gaze/head sample noise SD, deg");
  synth->add_option("--fixation-ms", synth_args.fixation_ms, "Plateau duration, ms");
  synth->add_option("--shift-ms", synth_args.shift_ms, "Ramp duration, ms");

  auto* preprocess = app.add_subcommand("preprocess", "Traces to cleaned gaze-shift table");
  Options pre_opts(preprocess);
  pre_opts.add_event_flags();
  std::string pre_in, pre_out, pre_sanity;
  preprocess->add_option("--in", pre_in, "Directory of trace CSVs")->required();
  preprocess->add_option("--out", pre_out, "Shift CSV to write")->required();
  preprocess->add_option("--sanity-out", pre_sanity, "Sanity reports, JSON lines");

  auto* fit = app.add_subcommand("fit", "Fit head-contribution models per participant");
  Options fit_opts(fit);
  fit_opts.add_fit_flags();
  std::string fit_in, fit_out, fit_model = "all";
  fit->add_option("--in", fit_in, "Shift CSV")->required();
  fit->add_option("--out", fit_out, "Fits JSON to write")->required();
  fit->add_option("--model", fit_model, "linear | hinge | soft-hinge | all")
      ->check(CLI::IsMember({"linear", "hinge", "soft-hinge", "all"}));

  auto* fpca = app.add_subcommand("fpca", "Build the population spectrum from soft-hinge fits");
  Options fpca_opts(fpca);
  fpca_opts.add("--components", "components", &PipelineConfig::components, "Retained components");
  std::string fpca_in, fpca_out;
  fpca->add_option("--in", fpca_in, "Fits JSON")->required();
  fpca->add_option("--out", fpca_out, "Spectrum JSON to write")->required();

  auto* project = app.add_subcommand("project", "Score fits against an existing spectrum");
  Options proj_opts(project);
  std::string proj_model, proj_in, proj_out;
  project->add_option("--model", proj_model, "Spectrum JSON")->required();
  project->add_option("--in", proj_in, "Fits JSON")->required();
  project->add_option("--out", proj_out, "Scores CSV to write")->required();

  auto* report = app.add_subcommand("report", "Write tables and plot data");
  Options report_opts(report);
  report_opts.add("--components", "components", &PipelineConfig::components, "Retained components");
  std::string rep_fits, rep_spectrum, rep_out;
  report->add_option("--fits", rep_fits, "Fits JSON")->required();
  report->add_option("--spectrum", rep_spectrum, "Spectrum JSON (fitted from --fits when absent)");
  report->add_option("--out", rep_out, "Report directory")->required();

  auto* sensitivity = app.add_subcommand("sensitivity", "Fixation-threshold robustness of soft-hinge curves");
  Options sens_opts(sensitivity);
  sens_opts.add_event_flags();
  sens_opts.add_fit_flags();
  std::string sens_in, sens_out;
  double sens_base = 15.0;
  std::vector<double> sens_thresholds{10.0, 20.0};
  sensitivity->add_option("--in", sens_in, "Directory of trace CSVs")->required();
  sensitivity->add_option("--out", sens_out, "Result JSON to write")->required();
  sensitivity->add_option("--base", sens_base, "Reference threshold, deg/s");
  sensitivity->add_option("--thresholds", sens_thresholds, "Alternative thresholds, deg/s")->delimiter(',');

  std::string stage = "cli";
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, stage, to_string(Errc::usage_error), e.what());
    return kExitUsage;
  }

  try {
    if (synth->parsed()) {
      stage = "synth";
      run_synth(synth_args, synth_opts.resolve(), out);
    } else if (preprocess->parsed()) {
      stage = "preprocess";
      run_preprocess(pre_in, pre_out, pre_sanity, pre_opts.resolve(), out);
    } else if (fit->parsed()) {
      stage = "fit";
      run_fit(fit_in, fit_out, fit_model, fit_opts.resolve(), out);
    } else if (fpca->parsed()) {
      stage = "fpca";
      run_fpca(fpca_in, fpca_out, fpca_opts.resolve(), out);
    } else if (project->parsed()) {
      stage = "project";
      run_project(proj_model, proj_in, proj_out, proj_opts.resolve(), out);
    } else if (report->parsed()) {
      stage = "report";
      run_report(rep_fits, rep_spectrum, rep_out, report_opts.resolve(), out);
    } else if (sensitivity->parsed()) {
      stage = "sensitivity";
      run_sensitivity(sens_in, sens_out, sens_base, sens_thresholds, sens_opts.resolve(), out);
    }
  } catch (const Error& e) {
    report_error(err, stage, to_string(e.code()), e.what());
    return e.code() == Errc::usage_error ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    report_error(err, stage, "internal", e.what());
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace ehs::cli
