#pragma once

#include <algorithm>
#include <cmath>

#include "tdjsarc/config.hpp"
#include "tdjsarc/errors.hpp"

namespace tdjsarc {

struct SarDerived {
  double eta = 0.0;        // incidence angle, rad
  double delta_r = 0.0;    // ground-range resolution, m
  double scr_slope = 0.0;  // SCR gained per sensing slot (linear)
};

inline SarDerived sar_derived(const ScenarioConfig& cfg) {
  SarDerived d;
  d.eta = cfg.eta();
  d.delta_r = cfg.delta_r();
  d.scr_slope = 4.0 * cfg.sigma_t * cfg.v_a * cfg.delta_t * cfg.B_r * std::sin(d.eta) /
                (cfg.sigma_0 * cfg.c * cfg.lambda_r * cfg.r_a);
  return d;
}

// Position/velocity estimate produced by the last sensing slot.
struct UncertaintyState {
  int l = 1;  // last sensing slot
  int L = 1;  // aperture length that produced the estimate
  Vec3 center = Vec3::Zero();
  Vec3 v_est = Vec3::Zero();
};

inline double azimuth_resolution(const ScenarioConfig& cfg, int L) {
  if (L < 1) throw DomainError("azimuth_resolution: aperture must be >= 1 slot");
  return cfg.lambda_r * cfg.r_a / (2.0 * cfg.v_a * L * cfg.delta_t);
}

// Signal-to-clutter ratio of an L-slot aperture, linear.
inline double scr(const ScenarioConfig& cfg, int L) {
  if (L < 1) throw DomainError("scr: aperture must be >= 1 slot");
  return sar_derived(cfg).scr_slope * L;
}

// Direct resolution-cell form; agrees with scr() to rounding.
inline double scr_from_cell(const ScenarioConfig& cfg, int L) {
  return cfg.sigma_t / (cfg.sigma_0 * cfg.delta_r() * azimuth_resolution(cfg, L));
}

// Smallest aperture meeting SCR_min.
inline int min_feasible_aperture(const ScenarioConfig& cfg) {
  const double slope = sar_derived(cfg).scr_slope;
  int L = std::max(1, static_cast<int>(std::ceil(cfg.scr_min / slope)) - 1);
  while (scr(cfg, L) < cfg.scr_min) ++L;
  return L;
}

inline double velocity_upper_bound(const ScenarioConfig& cfg, const UncertaintyState& u, int n) {
  if (n < u.l) throw DomainError("velocity_upper_bound: slot precedes the estimate");
  const double grown = u.v_est.norm() + (n - u.l) * cfg.a_e_max * cfg.delta_t;
  return cfg.velocity_bound == VelocityBoundMode::Cap ? std::min(grown, cfg.v_e_max)
                                                       : std::max(grown, cfg.v_e_max);
}

// Radius of the ground disk that contains the eavesdropper in slot n.
inline double uncertainty_radius(const ScenarioConfig& cfg, const UncertaintyState& u, int n) {
  const int partial = u.L - std::max(u.l - n, 0);
  if (partial < 1) throw DomainError("uncertainty_radius: slot precedes the aperture");
  const double dr = cfg.delta_r();
  const double da = azimuth_resolution(cfg, partial);
  double r = 0.5 * std::sqrt(dr * dr + da * da);
  if (n > u.l) r += (n - u.l) * velocity_upper_bound(cfg, u, n) * cfg.delta_t;
  return r;
}

inline bool in_region(const UncertaintyState& u, double r_e, const Vec3& q) {
  return q.z() == 0.0 && (q - u.center).norm() <= r_e;
}

}  // namespace tdjsarc
