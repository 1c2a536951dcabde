#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tdjsarc/config.hpp"
#include "tdjsarc/errors.hpp"
#include "tdjsarc/rng.hpp"
#include "tdjsarc/units.hpp"

namespace tdjsarc {

// ABS position and its local Frenet-Serret frame in slot n.
struct AbsPose {
  int n = 1;
  Vec3 q_a = Vec3::Zero();
  Vec3 e_perp = Vec3::Zero();  // array broadside, points toward the orbit center
  Vec3 e_t = Vec3::Zero();     // along-track
  Vec3 e_b{0.0, 0.0, 1.0};
};

inline double orbit_phase(const ScenarioConfig& cfg, int n, double phase0) {
  return phase0 + (n - 1) * cfg.delta_t * cfg.v_a / cfg.r_a;
}

inline AbsPose abs_pose(const ScenarioConfig& cfg, int n, double phase0) {
  if (n < 1 || n > cfg.N) {
    throw std::out_of_range("abs_pose: slot " + std::to_string(n) + " outside [1, " + std::to_string(cfg.N) + "]");
  }
  const double phi = orbit_phase(cfg, n, phase0);
  const double c = std::cos(phi), s = std::sin(phi);
  AbsPose p;
  p.n = n;
  p.q_a = Vec3(cfg.r_a * c, cfg.r_a * s, cfg.h);
  p.e_perp = Vec3(-c, -s, 0.0);
  p.e_t = Vec3(-s, c, 0.0);
  return p;
}

inline AbsPose abs_pose(const ScenarioConfig& cfg, int n) { return abs_pose(cfg, n, cfg.phase0); }

enum class TrackKind { Circular, LinearOscillating, Random };

inline std::string_view to_string(TrackKind k) {
  switch (k) {
    case TrackKind::Circular: return "circular";
    case TrackKind::LinearOscillating: return "linear-oscillating";
    case TrackKind::Random: return "random";
  }
  return "?";
}

// Ground-truth eavesdropper trajectory. Slot indices are 1-based in the
// accessors; velocities are forward differences, so slot N has none.
struct EveTrack {
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  TrackKind kind = TrackKind::Random;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(positions.size()); }
  const Vec3& position(int n) const { return positions.at(static_cast<std::size_t>(n - 1)); }
  const Vec3& velocity(int n) const { return velocities.at(static_cast<std::size_t>(n - 1)); }

  // Speed in slot n; the final slot reports the last available velocity.
  double speed(int n) const {
    if (velocities.empty()) return 0.0;
    const int k = std::min(n, static_cast<int>(velocities.size()));
    return velocity(k).norm();
  }
};

namespace detail {

inline void fill_velocities(const ScenarioConfig& cfg, EveTrack& t) {
  t.velocities.clear();
  t.velocities.reserve(t.positions.size() > 0 ? t.positions.size() - 1 : 0);
  for (std::size_t k = 0; k + 1 < t.positions.size(); ++k) {
    t.velocities.push_back((t.positions[k + 1] - t.positions[k]) / cfg.delta_t);
  }
}

}  // namespace detail

struct TrackKinematics {
  double max_speed = 0.0;
  double max_accel = 0.0;
  double max_altitude = 0.0;
  double max_range = 0.0;  // from the origin
};

inline TrackKinematics track_kinematics(const ScenarioConfig& cfg, const EveTrack& t) {
  TrackKinematics k;
  for (const auto& p : t.positions) {
    k.max_altitude = std::max(k.max_altitude, std::abs(p.z()));
    k.max_range = std::max(k.max_range, p.norm());
  }
  for (std::size_t i = 0; i < t.velocities.size(); ++i) {
    k.max_speed = std::max(k.max_speed, t.velocities[i].norm());
    if (i + 1 < t.velocities.size()) {
      k.max_accel = std::max(k.max_accel, (t.velocities[i + 1] - t.velocities[i]).norm() / cfg.delta_t);
    }
  }
  return k;
}

// Checks the EveTrack invariants. Scripted circular tracks may exceed the
// acceleration cap (centripetal), so that check is optional.
inline void validate_track(const ScenarioConfig& cfg, const EveTrack& t, bool check_accel = true,
                           double slack = 1e-9) {
  if (t.positions.empty()) throw ValidationError("track is empty");
  if (t.velocities.size() + 1 != t.positions.size()) throw ValidationError("track velocity count must be N - 1");
  const auto k = track_kinematics(cfg, t);
  if (k.max_altitude != 0.0) throw ValidationError("eavesdropper must stay on the ground");
  if (k.max_speed > cfg.v_e_max * (1.0 + slack)) throw ValidationError("track exceeds v_e_max");
  if (check_accel && k.max_accel > cfg.a_e_max * (1.0 + slack) + slack) {
    throw ValidationError("track exceeds a_e_max");
  }
}

// Constant-speed circle around the user; start angle drawn from `seed`.
inline EveTrack gen_eve_circular(const ScenarioConfig& cfg, double radius, double speed, std::uint64_t seed) {
  if (!(speed >= 0.0) || speed > cfg.v_e_max) throw ValidationError("circular track: speed must be in [0, v_e_max]");
  if (!(radius > 0.0)) throw ValidationError("circular track: radius must be > 0");
  Rng rng(seed);
  const double psi0 = 2.0 * kPi * uniform01(rng);
  const double omega = speed / radius;
  EveTrack t;
  t.kind = TrackKind::Circular;
  t.seed = seed;
  t.positions.reserve(static_cast<std::size_t>(cfg.N));
  for (int n = 1; n <= cfg.N; ++n) {
    const double psi = psi0 + omega * (n - 1) * cfg.delta_t;
    t.positions.emplace_back(cfg.q_u.x() + radius * std::cos(psi), cfg.q_u.y() + radius * std::sin(psi), 0.0);
  }
  detail::fill_velocities(cfg, t);
  return t;
}

// Straight line with sinusoidal speed between v_lo and v_hi. The speed slope
// is clipped to a_e_max * delta_t per slot. The profile starts at v_lo.
inline EveTrack gen_eve_linear_oscillating(const ScenarioConfig& cfg, double heading, double v_lo, double v_hi,
                                           double period, const Vec3& start, std::uint64_t seed) {
  if (!(v_lo >= 0.0) || v_lo > v_hi) throw ValidationError("linear track: need 0 <= v_lo <= v_hi");
  if (v_hi > cfg.v_e_max) throw ValidationError("linear track: v_hi exceeds v_e_max");
  if (!(period > 0.0)) throw ValidationError("linear track: period must be > 0");
  const Vec3 dir(std::cos(heading), std::sin(heading), 0.0);
  const double mid = 0.5 * (v_lo + v_hi), amp = 0.5 * (v_hi - v_lo);
  const double max_step = cfg.a_e_max * cfg.delta_t;

  EveTrack t;
  t.kind = TrackKind::LinearOscillating;
  t.seed = seed;
  t.positions.reserve(static_cast<std::size_t>(cfg.N));
  Vec3 q(start.x(), start.y(), 0.0);
  double speed = v_lo;
  t.positions.push_back(q);
  for (int n = 1; n < cfg.N; ++n) {
    if (n > 1) {
      const double target = mid - amp * std::cos(2.0 * kPi * (n - 1) / period);
      speed += std::clamp(target - speed, -max_step, max_step);
    }
    q += dir * (speed * cfg.delta_t);
    q.z() = 0.0;
    t.positions.push_back(q);
  }
  detail::fill_velocities(cfg, t);
  return t;
}

namespace detail {

// Velocity after one slot of maximal braking.
inline Vec3 brake(const Vec3& v, double dv) {
  const double s = v.norm();
  return s <= dv ? Vec3::Zero() : Vec3(v * (1.0 - dv / s));
}

// True if entering a slot at `p` with velocity `v` and braking afterwards
// keeps every later position inside the confinement radius.
inline bool braking_safe(const Vec3& p, Vec3 v, double dv, double dt, double bound) {
  Vec3 q = p + v * dt;
  if (q.norm() > bound) return false;
  while (v.squaredNorm() > 0.0) {
    v = brake(v, dv);
    q += v * dt;
    if (q.norm() > bound) return false;
  }
  return true;
}

inline Vec3 clip_speed(const Vec3& v, double cap) {
  const double s = v.norm();
  return s > cap ? Vec3(v * (cap / s)) : v;
}

}  // namespace detail

// Random-acceleration walk confined to a ground disk of radius 1.1 r_r around
// the origin. Each slot draws an acceleration uniformly in the disk of radius
// a_e_max and clips the speed to v_e_max. A proposal that could no longer
// stop inside the disk is replaced by a turn toward the origin, and failing
// that by full braking, which keeps the walk confined without ever
// exceeding the acceleration cap.
inline EveTrack gen_eve_random(const ScenarioConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  const double bound = 1.1 * cfg.r_r;
  const double dv = cfg.a_e_max * cfg.delta_t;
  const double dt = cfg.delta_t;

  auto disk_sample = [&](double radius) {
    const double r = radius * std::sqrt(uniform01(rng));
    const double a = 2.0 * kPi * uniform01(rng);
    return Vec3(r * std::cos(a), r * std::sin(a), 0.0);
  };

  EveTrack t;
  t.kind = TrackKind::Random;
  t.seed = seed;
  t.positions.reserve(static_cast<std::size_t>(cfg.N));

  Vec3 q = disk_sample(cfg.r_r);
  const double heading = 2.0 * kPi * uniform01(rng);
  double speed0 = cfg.v_e_max * uniform01(rng);
  Vec3 v(speed0 * std::cos(heading), speed0 * std::sin(heading), 0.0);
  while (!detail::braking_safe(q, v, dv, dt, bound)) v *= 0.5;
  if (v.norm() < 1e-9) v.setZero();

  t.positions.push_back(q);
  for (int n = 1; n < cfg.N; ++n) {
    if (n > 1) {
      const Vec3 proposal = detail::clip_speed(v + disk_sample(cfg.a_e_max) * dt, cfg.v_e_max);
      if (detail::braking_safe(q, proposal, dv, dt, bound)) {
        v = proposal;
      } else {
        const double r = q.norm();
        const Vec3 inward = r > 0.0 ? Vec3(-q / r) : Vec3::Zero();
        const Vec3 turn = detail::clip_speed(v + inward * dv, cfg.v_e_max);
        v = detail::braking_safe(q, turn, dv, dt, bound) ? turn : detail::brake(v, dv);
      }
    }
    q += v * dt;
    q.z() = 0.0;
    t.positions.push_back(q);
  }
  detail::fill_velocities(cfg, t);
  return t;
}

}  // namespace tdjsarc
