#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ehs/pipeline.hpp"

namespace ehs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand (`preprocess | fit | fpca | project | report | sensitivity | synth`).
/// `args` excludes the program name. Errors go to `err` as a single JSON object.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Loads every `<name>_gaze.csv` / `<name>_head.csv` pair below `dir`, grouped by participant.
/// A file without its partner becomes a trial with an empty stream.
std::vector<ParticipantTrials> load_participants(const std::string& dir);

}  // namespace ehs::cli
