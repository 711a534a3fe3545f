#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ehs/error.hpp"
#include "ehs/stats.hpp"

namespace ehs::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(10);
  ss << v;
  return ss.str();
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& v) {
  MeanSd out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

std::string model_comparison_csv(std::span<const FitResult> fits, const Provenance& prov) {
  std::map<ModelKind, std::vector<const FitResult*>> by_model;
  for (const auto& f : fits) by_model[f.model()].push_back(&f);
  std::ostringstream out;
  out << prov.csv_line();
  out << "model,n,mean_r2,sd_r2,mean_rmse,sd_rmse,mean_aic,sd_aic\n";
  for (const auto& [kind, rs] : by_model) {
    std::vector<double> r2, rmse, aic;
    for (const auto* r : rs) {
      if (r->r2) r2.push_back(*r->r2);
      rmse.push_back(r->rmse);
      aic.push_back(r->aic);
    }
    const auto a = mean_sd(r2), b = mean_sd(rmse), c = mean_sd(aic);
    out << to_string(kind) << ',' << rs.size() << ',' << num(a.mean) << ',' << num(a.sd) << ',' << num(b.mean) << ','
        << num(b.sd) << ',' << num(c.mean) << ',' << num(c.sd) << '\n';
  }
  return out.str();
}

}  // namespace

std::vector<LabelledParams> soft_hinge_curves(std::span<const FitResult> fits) {
  std::vector<LabelledParams> out;
  for (const auto& f : fits) {
    if (f.model() == ModelKind::soft_hinge) out.push_back({f.participant_id, f.params});
  }
  return out;
}

ReportFiles emit_report(std::span<const FitResult> fits, const std::optional<SpectrumModel>& spectrum,
                        const fs::path& out_dir, const Provenance& provenance, std::size_t n_components) {
  if (fits.empty()) fail(Errc::missing_input, "report: no fitted participants");
  const auto curves = soft_hinge_curves(fits);
  if (curves.empty()) fail(Errc::missing_input, "report: fits contain no soft-hinge results");

  ReportFiles files;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(out_dir / name, content);
    files.written.push_back(name);
  };

  SpectrumModel model;
  if (spectrum) {
    model = *spectrum;
  } else {
    try {
      model = fit_fpca(sample_curves(curves), std::min(n_components, curves.size() > 1 ? curves.size() - 1 : 1));
    } catch (const Error& e) {
      std::ostringstream md;
      md << "# Eye-head spectrum report\n\n";
      md << "Report incomplete: stage `fpca` failed with `" << to_string(e.code()) << "`.\n\n";
      md << "> " << e.what() << "\n\n";
      md << "Fitted soft-hinge curves: " << curves.size() << ". The spectrum needs at least 2.\n";
      emit("summary.md", md.str());
      throw;
    }
  }
  if (model.grid != eccentricity_grid()) fail(Errc::grid_mismatch, "report: spectrum grid is not 0..50 in 1 deg steps");

  // (a) mode reconstructions
  {
    std::ostringstream out;
    out << provenance.csv_line() << "x_deg,mean";
    const std::size_t shown = std::min<std::size_t>(2, model.n_components());
    std::vector<std::vector<double>> cols;
    for (std::size_t c = 0; c < shown; ++c) {
      out << ",pc" << c + 1 << "_plus2sd,pc" << c + 1 << "_minus2sd";
      cols.push_back(reconstruct_mode(model, c, 2.0));
      cols.push_back(reconstruct_mode(model, c, -2.0));
    }
    out << '\n';
    for (std::size_t j = 0; j < model.grid.size(); ++j) {
      out << num(model.grid[j]) << ',' << num(model.mean_curve[j]);
      for (const auto& col : cols) out << ',' << num(col[j]);
      out << '\n';
    }
    emit("modes.csv", out.str());
  }

  // (b) scores
  std::vector<double> pc1;
  {
    std::ostringstream out;
    out << provenance.csv_line() << "curve_id,pc1,pc2,percentile_pc1\n";
    const auto sampled = sample_curves(curves);
    for (std::size_t i = 0; i < curves.size(); ++i) {
      const auto s = project_curve(sampled.values[i], model, curves[i].id);
      out << s.curve_id << ',' << num(s.pc_scores.at(0)) << ','
          << (s.pc_scores.size() > 1 ? num(s.pc_scores[1]) : std::string()) << ',' << num(s.percentile_pc1) << '\n';
      pc1.push_back(s.pc_scores.at(0));
    }
    emit("scores.csv", out.str());
  }

  // (c) density and quartile markers
  const auto summary = describe_distribution(pc1);
  bool have_density = false;
  {
    nlohmann::ordered_json j;
    j["provenance"] = provenance.json();
    j["n"] = summary.n;
    j["min"] = summary.min;
    j["q1"] = summary.q1;
    j["median"] = summary.median;
    j["q3"] = summary.q3;
    j["max"] = summary.max;
    if (summary.skewness) j["skewness"] = *summary.skewness;
    else j["skewness"] = nullptr;
    emit("pc1_summary.json", j.dump(2) + "\n");

    try {
      const double h = silverman_bandwidth(pc1);
      const double lo = summary.min - 3.0 * h;
      const double hi = summary.max + 3.0 * h;
      constexpr std::size_t kPoints = 201;
      std::vector<double> xs(kPoints);
      for (std::size_t k = 0; k < kPoints; ++k) xs[k] = lo + (hi - lo) * static_cast<double>(k) / (kPoints - 1);
      const auto dens = kde_density(pc1, xs);
      std::ostringstream out;
      out << provenance.csv_line() << "x,density\n";
      for (std::size_t k = 0; k < kPoints; ++k) out << num(xs[k]) << ',' << num(dens[k]) << '\n';
      emit("pc1_density.csv", out.str());
      have_density = true;
    } catch (const Error& e) {
      if (e.code() != Errc::zero_spread) throw;
    }
  }

  // (d) model comparison
  emit("model_comparison.csv", model_comparison_csv(fits, provenance));

  // (e) summary
  {
    std::ostringstream md;
    md << "<!-- provenance: " << provenance.json().dump() << " -->\n";
    md << "# Eye-head spectrum report\n\n";
    md << "Participants with soft-hinge fits: " << curves.size() << "\n\n";
    md << "| component | eigenvalue | explained variance |\n|---|---|---|\n";
    for (std::size_t c = 0; c < model.n_components(); ++c) {
      md << "| PC" << c + 1 << " | " << num(model.eigenvalues[c]) << " | " << num(100.0 * model.explained_ratio[c])
         << "% |\n";
    }
    md << "\nPC1 scores: median " << num(summary.median) << ", Q1 " << num(summary.q1) << ", Q3 " << num(summary.q3)
       << "\n\n";
    md << "- [Mode reconstructions](modes.csv)\n";
    md << "- [Scores and percentiles](scores.csv)\n";
    if (have_density) md << "- [PC1 score density](pc1_density.csv)\n";
    md << "- [PC1 distribution summary](pc1_summary.json)\n";
    md << "- [Model comparison](model_comparison.csv)\n";
    emit("summary.md", md.str());
  }
  return files;
}

}  // namespace ehs::cli
