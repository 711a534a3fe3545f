#pragma once

#include <span>
#include <string>
#include <vector>

#include "ehs/events.hpp"
#include "ehs/ingest.hpp"

namespace ehs {

struct TrialStreams {
  RawStream gaze;
  RawStream head;
};

struct ParticipantTrials {
  std::string participant_id;
  std::vector<TrialStreams> trials;
};

struct PreprocessConfig {
  EventConfig events;
  SanityConfig sanity;
  // Participants failing the trial-count check contribute no shifts.
  bool require_participant_pass = true;
};

struct TrialOutcome {
  SanityReport sanity;
  std::vector<GazeShift> shifts;  // signed, before symmetrisation
};

struct ParticipantOutcome {
  ParticipantVerdict verdict;
  std::vector<SanityReport> reports;
  ShiftSet shifts;
};

/// Alignment, sanity check and event extraction for one trial. Trials failing the sanity
/// check yield no shifts.
TrialOutcome preprocess_trial(const RawStream& gaze, const RawStream& head, const PreprocessConfig& cfg);

ParticipantOutcome preprocess_participant(const ParticipantTrials& participant, const PreprocessConfig& cfg);

std::vector<ParticipantOutcome> preprocess_all(std::span<const ParticipantTrials> participants,
                                               const PreprocessConfig& cfg, unsigned threads = 1);

}  // namespace ehs
