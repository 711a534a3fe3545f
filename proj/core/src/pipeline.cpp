#include "ehs/pipeline.hpp"

#include "ehs/error.hpp"
#include "parallel.hpp"

namespace ehs {

TrialOutcome preprocess_trial(const RawStream& gaze, const RawStream& head, const PreprocessConfig& cfg) {
  TrialOutcome out;
  if (gaze.samples.empty() || head.samples.empty()) {
    out.sanity = missing_stream_report(gaze.participant_id, gaze.trial_id);
    return out;
  }
  Trace trace;
  try {
    trace = align_head_to_gaze(gaze, head);
  } catch (const Error& e) {
    if (e.code() != Errc::no_overlap) throw;
    out.sanity.participant_id = gaze.participant_id;
    out.sanity.trial_id = gaze.trial_id;
    out.sanity.reason = SanityReason::short_overlap;
    return out;
  }
  out.sanity = sanity_check(trace, cfg.sanity);
  if (out.sanity.pass) out.shifts = trial_shifts(trace, cfg.events);
  return out;
}

ParticipantOutcome preprocess_participant(const ParticipantTrials& participant, const PreprocessConfig& cfg) {
  ParticipantOutcome out;
  std::vector<GazeShift> signed_shifts;
  for (const auto& trial : participant.trials) {
    auto t = preprocess_trial(trial.gaze, trial.head, cfg);
    if (t.sanity.participant_id.empty()) t.sanity.participant_id = participant.participant_id;
    out.reports.push_back(t.sanity);
    signed_shifts.insert(signed_shifts.end(), t.shifts.begin(), t.shifts.end());
  }
  out.verdict = check_participant(out.reports, cfg.sanity);
  out.verdict.participant_id = participant.participant_id;

  if (out.verdict.pass || !cfg.require_participant_pass) {
    out.shifts = symmetrize_and_clean(signed_shifts, cfg.events.max_ecc_deg);
  }
  out.shifts.participant_id = participant.participant_id;
  out.shifts.provenance = cfg.events;
  return out;
}

std::vector<ParticipantOutcome> preprocess_all(std::span<const ParticipantTrials> participants,
                                               const PreprocessConfig& cfg, unsigned threads) {
  std::vector<ParticipantOutcome> out(participants.size());
  detail::parallel_for(participants.size(), threads,
                       [&](std::size_t i) { out[i] = preprocess_participant(participants[i], cfg); });
  return out;
}

}  // namespace ehs
