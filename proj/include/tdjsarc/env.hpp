#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "tdjsarc/channel.hpp"
#include "tdjsarc/config.hpp"
#include "tdjsarc/errors.hpp"
#include "tdjsarc/sar.hpp"
#include "tdjsarc/scenario.hpp"
#include "tdjsarc/secrecy.hpp"
#include "tdjsarc/units.hpp"

namespace tdjsarc {

// a[n] = 1 senses, a[n] = 0 communicates.
enum class Action : int { Communicate = 0, Sense = 1 };

inline constexpr int kObsDim = 6;

struct Observation {
  double s1 = 0.0;   // frozen aperture / N
  double s2x = 0.0;  // velocity estimate / v_e_max
  double s2y = 0.0;
  double s3 = 0.0;   // uncertainty radius / r_r
  double s4 = 0.0;   // |theta_hat_e - theta_u| / pi
  double s5 = 0.0;   // (d_hat_e - d_u) / (2 r_a)

  std::array<double, kObsDim> values() const { return {s1, s2x, s2y, s3, s4, s5}; }
};

struct EnvState {
  int n = 0;  // last processed slot
  int i = 0;  // frame index
  int l = 0;  // last sensing slot
  int L_run = 0;
  int L_frozen = 0;
  UncertaintyState u;
  double cum_user_rate = 0.0;
  Action prev_action = Action::Sense;
  Action prev_prev_action = Action::Sense;
  std::uint64_t seed = 0;
  double phase0 = 0.0;
};

struct SlotOutcome {
  int n = 0;
  int frame = 0;
  Action action = Action::Sense;
  double reward = 0.0;
  double R_u = 0.0;
  double R_e_worst = 0.0;
  double R = 0.0;
  double alpha = 0.0;
  double r_e = 0.0;
  double scr_db_frozen = 0.0;
  double eve_speed = 0.0;
  bool scr_penalty_fired = false;
  bool done = false;
};

struct ActionMask {
  bool sense = true;
  bool communicate = true;

  bool allows(Action a) const { return a == Action::Sense ? sense : communicate; }
};

// Slot 1 must sense (no estimate exists yet); slot N must communicate so the
// final frame keeps L_I <= T_I - 1.
inline ActionMask action_mask_for_slot(int slot, int N) {
  if (slot <= 1) return {true, false};
  if (slot >= N) return {false, true};
  return {true, true};
}

// Per-episode scheduling MDP. One instance per episode; not thread-safe,
// independent instances share nothing mutable.
class SchedulingEnv {
public:
  explicit SchedulingEnv(const ScenarioConfig& cfg) : cfg_(&cfg), grid_(SolverGrid::from(cfg)) {}

  Observation reset(const EveTrack& track, double phase0, std::uint64_t seed) {
    if (track.size() != cfg_->N) throw ContractViolation("reset: track length must equal N");
    track_ = &track;
    state_ = EnvState{};
    state_.seed = seed;
    state_.phase0 = phase0;
    state_.i = 1;
    last_ = apply_sensing(1);
    state_.n = 1;
    state_.prev_action = Action::Sense;
    state_.prev_prev_action = Action::Sense;
    return observe();
  }

  Observation reset(const EveTrack& track, std::uint64_t seed = 0) { return reset(track, cfg_->phase0, seed); }

  const EnvState& state() const { return state_; }
  const SlotOutcome& first_outcome() const { return last_; }
  const ScenarioConfig& config() const { return *cfg_; }
  bool done() const { return state_.n >= cfg_->N; }

  ActionMask action_mask() const { return action_mask_for_slot(state_.n + 1, cfg_->N); }

  struct StepResult {
    Observation obs;
    SlotOutcome outcome;
  };

  StepResult step(Action a) {
    if (track_ == nullptr) throw ContractViolation("step: call reset first");
    if (done()) throw ContractViolation("step: episode already finished");
    if (!action_mask().allows(a)) throw ContractViolation("step: action is masked in this slot");
    const int n = state_.n + 1;
    SlotOutcome out = a == Action::Sense ? apply_sensing(n) : apply_communication(n);
    state_.prev_prev_action = state_.prev_action;
    state_.prev_action = a;
    state_.n = n;
    out.done = n == cfg_->N;
    return {observe(), out};
  }

  Observation observe() const {
    const ScenarioConfig& c = *cfg_;
    const AbsPose pose = abs_pose(c, state_.n, state_.phase0);
    Observation o;
    o.s1 = static_cast<double>(state_.L_frozen) / c.N;
    o.s2x = state_.u.v_est.x() / c.v_e_max;
    o.s2y = state_.u.v_est.y() / c.v_e_max;
    o.s3 = uncertainty_radius(c, state_.u, state_.n) / c.r_r;
    const double theta_e = azimuth(pose, state_.u.center);
    const double theta_u = azimuth(pose, c.q_u);
    o.s4 = std::abs(wrap_angle(theta_e - theta_u)) / kPi;
    const double d_e = (pose.q_a - state_.u.center).norm();
    const double d_u = (pose.q_a - c.q_u).norm();
    o.s5 = (d_e - d_u) / (2.0 * c.r_a);
    return o;
  }

private:
  SlotOutcome apply_sensing(int n) {
    const ScenarioConfig& c = *cfg_;
    if (n > 1 && state_.prev_action == Action::Communicate) {
      state_.L_run = 1;
      ++state_.i;
    } else {
      ++state_.L_run;
    }
    state_.l = n;
    state_.L_frozen = state_.L_run;
    state_.u.l = n;
    state_.u.L = state_.L_frozen;
    state_.u.center = track_->position(n);
    state_.u.v_est = track_->velocity(std::min(n, c.N - 1));

    SlotOutcome out;
    out.n = n;
    out.frame = state_.i;
    out.action = Action::Sense;
    out.r_e = uncertainty_radius(c, state_.u, n);
    out.scr_db_frozen = linear_to_db(scr(c, state_.L_frozen));
    out.eve_speed = track_->speed(n);
    return out;
  }

  SlotOutcome apply_communication(int n) {
    const ScenarioConfig& c = *cfg_;
    SlotOutcome out;
    out.n = n;
    out.frame = state_.i;
    out.action = Action::Communicate;
    out.r_e = uncertainty_radius(c, state_.u, n);
    const double scr_frozen = scr(c, state_.L_frozen);
    out.scr_db_frozen = linear_to_db(scr_frozen);
    out.eve_speed = track_->speed(n);
    if (scr_frozen < c.scr_min) {
      out.scr_penalty_fired = true;
      out.reward = -c.rho_2;
      return out;
    }
    const AbsPose pose = abs_pose(c, n, state_.phase0);
    const RobustResult r = robust_power_allocation(c, pose, state_.u, out.r_e, grid_);
    out.alpha = r.alpha_star;
    out.R_u = r.user_rate;
    out.R_e_worst = r.worst_point_eve_rate;
    out.R = r.secrecy_rate;
    state_.cum_user_rate += r.user_rate;
    out.reward = out.R - c.rho_1 * std::max(c.R_min - state_.cum_user_rate / n, 0.0);
    return out;
  }

  const ScenarioConfig* cfg_;
  SolverGrid grid_;
  const EveTrack* track_ = nullptr;
  EnvState state_;
  SlotOutcome last_;
};

// Frame structure recovered from a binary action sequence. Slot indices are
// 1-based.
struct Schedule {
  int I = 0;
  std::vector<int> T;
  std::vector<int> L;
  std::vector<int> l;

  std::vector<int> C() const {
    std::vector<int> c(T.size());
    for (std::size_t k = 0; k < T.size(); ++k) c[k] = T[k] - L[k];
    return c;
  }
};

// Frames start at every communicate -> sense transition.
inline Schedule reconstruct_schedule(std::span<const Action> actions) {
  const int N = static_cast<int>(actions.size());
  if (N < 2) throw ContractViolation("reconstruct_schedule: need at least two slots");
  if (actions.front() != Action::Sense) throw ContractViolation("reconstruct_schedule: slot 1 must sense");
  if (actions.back() != Action::Communicate) throw ContractViolation("reconstruct_schedule: slot N must communicate");
  Schedule s;
  int start = 1;
  auto close = [&](int end) {
    int L = 0;
    while (start + L <= end && actions[static_cast<std::size_t>(start + L - 1)] == Action::Sense) ++L;
    s.T.push_back(end - start + 1);
    s.L.push_back(L);
    s.l.push_back(start + L - 1);
  };
  for (int n = 2; n <= N; ++n) {
    const bool new_frame = actions[static_cast<std::size_t>(n - 1)] == Action::Sense &&
                           actions[static_cast<std::size_t>(n - 2)] == Action::Communicate;
    if (new_frame) {
      close(n - 1);
      start = n;
    }
  }
  close(N);
  s.I = static_cast<int>(s.T.size());
  return s;
}

// Checks the framing constraints: sum T_i = N, 2 <= T_i <= N, 1 <= L_i <= T_i - 1.
inline bool schedule_is_valid(const Schedule& s, int N) {
  long total = 0;
  for (int k = 0; k < s.I; ++k) {
    if (s.T[k] < 2 || s.T[k] > N) return false;
    if (s.L[k] < 1 || s.L[k] > s.T[k] - 1) return false;
    total += s.T[k];
  }
  return total == N && s.I == static_cast<int>(s.T.size());
}

}  // namespace tdjsarc
