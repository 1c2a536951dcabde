#pragma once

#include <span>
#include <vector>

#include "tdjsarc/env.hpp"
#include "tdjsarc/sar.hpp"

namespace tdjsarc {

struct EpisodeLog {
  std::vector<Action> actions;
  std::vector<SlotOutcome> slots;  // slot 1 first
  Schedule schedule;
  double mean_secrecy = 0.0;    // (1/N) sum R[n]
  double mean_user_rate = 0.0;  // (1/N) sum R_u[n]
  double total_reward = 0.0;
  int scr_violations = 0;  // communication slots that fired the SCR penalty
  int comm_slots = 0;
  bool r_min_satisfied = false;
  bool data_frames_meet_scr = true;  // every frame that carried data had SCR >= SCR_min
};

// Aggregates per-slot outcomes. The SCR check is recomputed from the
// reconstructed frames rather than trusted from the slot flags.
inline void finalize_log(const ScenarioConfig& cfg, EpisodeLog& log) {
  const int N = static_cast<int>(log.slots.size());
  double sum_r = 0.0, sum_u = 0.0, sum_reward = 0.0;
  log.scr_violations = 0;
  log.comm_slots = 0;
  for (const auto& s : log.slots) {
    sum_r += s.R;
    sum_u += s.R_u;
    sum_reward += s.reward;
    if (s.action == Action::Communicate) {
      ++log.comm_slots;
      if (s.scr_penalty_fired) ++log.scr_violations;
    }
  }
  log.mean_secrecy = N > 0 ? sum_r / N : 0.0;
  log.mean_user_rate = N > 0 ? sum_u / N : 0.0;
  log.total_reward = sum_reward;
  log.r_min_satisfied = log.mean_user_rate >= cfg.R_min;
  log.schedule = reconstruct_schedule(log.actions);

  log.data_frames_meet_scr = true;
  int slot = 1;
  for (int f = 0; f < log.schedule.I; ++f) {
    bool carried = false;
    for (int k = 0; k < log.schedule.T[f]; ++k, ++slot) {
      const auto& s = log.slots[static_cast<std::size_t>(slot - 1)];
      if (s.action == Action::Communicate && s.R_u > 0.0) carried = true;
    }
    if (carried && scr(cfg, log.schedule.L[f]) < cfg.scr_min) log.data_frames_meet_scr = false;
  }
}

// Replays a fixed action sequence through the environment.
inline EpisodeLog evaluate_schedule(const ScenarioConfig& cfg, std::span<const Action> actions, const EveTrack& track,
                                    double phase0) {
  if (static_cast<int>(actions.size()) != cfg.N) throw ContractViolation("evaluate_schedule: need exactly N actions");
  if (actions.front() != Action::Sense) throw ContractViolation("evaluate_schedule: slot 1 must sense");
  SchedulingEnv env(cfg);
  env.reset(track, phase0, 0);
  EpisodeLog log;
  log.actions.assign(actions.begin(), actions.end());
  log.slots.reserve(actions.size());
  log.slots.push_back(env.first_outcome());
  for (std::size_t k = 1; k < actions.size(); ++k) log.slots.push_back(env.step(actions[k]).outcome);
  finalize_log(cfg, log);
  return log;
}

inline EpisodeLog evaluate_schedule(const ScenarioConfig& cfg, std::span<const Action> actions, const EveTrack& track) {
  return evaluate_schedule(cfg, actions, track, cfg.phase0);
}

}  // namespace tdjsarc
