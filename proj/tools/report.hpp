#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ehs/fitting.hpp"
#include "ehs/fpca.hpp"
#include "provenance.hpp"

namespace ehs::cli {

struct ReportFiles {
  std::vector<std::string> written;  // names relative to the report directory
};

/// Soft-hinge fits as labelled curve parameters, in file order.
std::vector<LabelledParams> soft_hinge_curves(std::span<const FitResult> fits);

/// Writes the report bundle into `out_dir`:
///   modes.csv             mean curve and +-2 SD reconstructions along PC1 and PC2
///   scores.csv            per-participant scores and PC1 percentile
///   pc1_density.csv       kernel density of PC1 scores
///   pc1_summary.json      quartiles and skewness of PC1 scores
///   model_comparison.csv  mean and SD of R^2, RMSE and AIC per model
///   summary.md            index of the above
/// When no spectrum is given it is fitted from the soft-hinge curves. If that stage fails,
/// summary.md names the failing stage and the error is rethrown.
ReportFiles emit_report(std::span<const FitResult> fits, const std::optional<SpectrumModel>& spectrum,
                        const std::filesystem::path& out_dir, const Provenance& provenance,
                        std::size_t n_components = 2);

}  // namespace ehs::cli
