#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "tdjsarc/channel.hpp"
#include "tdjsarc/config.hpp"
#include "tdjsarc/errors.hpp"
#include "tdjsarc/sar.hpp"
#include "tdjsarc/scenario.hpp"
#include "tdjsarc/units.hpp"

namespace tdjsarc {

// MRT beamformer toward the user plus rank-one artificial noise steered at
// the last eavesdropper estimate. alpha is the share of P_com_max spent on AN.
struct TxDesign {
  CVec w;       // sqrt((1 - alpha) P) h_u / |h_u|
  CVec an_dir;  // unit-norm AN direction
  double alpha = 0.0;
  double power = 0.0;  // P_com_max

  Eigen::MatrixXcd an_covariance() const { return (alpha * power) * an_dir * an_dir.adjoint(); }
  double an_power() const { return alpha * power; }
};

inline TxDesign tx_design(const ScenarioConfig& cfg, const AbsPose& pose, const UncertaintyState& u, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("tx_design: alpha must be in [0, 1]");
  const ChannelVec h_u = channel(cfg, pose, cfg.q_u);
  const ChannelVec h_hat = channel(cfg, pose, u.center);
  TxDesign tx;
  tx.alpha = alpha;
  tx.power = cfg.P_com_max;
  tx.an_dir = h_hat.entries / h_hat.entries.norm();
  tx.w = h_u.entries * (std::sqrt((1.0 - alpha) * cfg.P_com_max) / h_u.entries.norm());
  return tx;
}

// SINR at a receiver with channel h: |w^H h|^2 / (h^H A h + noise).
inline double received_sinr(const TxDesign& tx, const CVec& h, double noise) {
  const double signal = std::norm(tx.w.dot(h));
  const double jam = tx.an_power() * std::norm(tx.an_dir.dot(h));
  return signal / (jam + noise);
}

inline double user_rate(const ScenarioConfig& cfg, const AbsPose& pose, const UncertaintyState& u, double alpha) {
  const TxDesign tx = tx_design(cfg, pose, u, alpha);
  const ChannelVec h_u = channel(cfg, pose, cfg.q_u);
  return std::log2(1.0 + received_sinr(tx, h_u.entries, cfg.sigma_u2));
}

inline double eve_rate_at(const ScenarioConfig& cfg, const AbsPose& pose, const UncertaintyState& u, double alpha,
                          const Vec3& q_e) {
  const TxDesign tx = tx_design(cfg, pose, u, alpha);
  const ChannelVec h_e = channel(cfg, pose, q_e);
  return std::log2(1.0 + received_sinr(tx, h_e.entries, cfg.sigma_e2));
}

// Half-width of the azimuth interval subtended by the uncertainty region.
inline double delta_theta(double d_hat, double r_e) {
  if (d_hat <= r_e) return kPi;
  return std::asin(r_e / d_hat);
}

inline constexpr double kMinDistance = 1.0;  // beta_0 reference distance, m

// Distance to the nearest point of the region along azimuth theta: smaller
// non-negative root of d^2 - 2 d_hat cos(theta - theta_hat) d + d_hat^2 - r_e^2.
inline double worst_distance(double d_hat, double theta_hat, double theta, double r_e) {
  const double b = d_hat * std::cos(wrap_angle(theta - theta_hat));
  double disc = b * b - (d_hat * d_hat - r_e * r_e);
  if (disc < -1e-9 * std::max(1.0, d_hat * d_hat)) {
    throw GeometryError("worst_distance: azimuth outside the uncertainty interval");
  }
  disc = std::max(disc, 0.0);
  const double sq = std::sqrt(disc);
  double d = b - sq;
  if (d < 0.0) {
    // the ABS projection lies inside the region: the ray starts in it
    if (d_hat <= r_e) d = 0.0;
    else throw GeometryError("worst_distance: no non-negative root");
  }
  return std::max(d, kMinDistance);
}

struct SolverGrid {
  double eps_alpha = 0.01;
  double eps_theta = 0.01;

  static SolverGrid from(const ScenarioConfig& cfg) { return {cfg.eps_alpha, cfg.eps_theta}; }
};

// {0, eps, 2 eps, ..., 1}; 1 is always the last element.
inline std::vector<double> alpha_grid(double eps) {
  std::vector<double> a;
  for (int k = 0;; ++k) {
    const double v = k * eps;
    if (v >= 1.0 - 1e-12) break;
    a.push_back(v);
  }
  a.push_back(1.0);
  return a;
}

// {theta_hat - dtheta, ... step eps ..., theta_hat + dtheta}, endpoint always
// included. For dtheta = pi the grid covers the circle once without the
// duplicated endpoint.
inline std::vector<double> theta_grid(double theta_hat, double dtheta, double eps) {
  std::vector<double> t;
  if (dtheta >= kPi) {
    for (int k = 0;; ++k) {
      const double off = k * eps;
      if (off >= 2.0 * kPi - 1e-12) break;
      t.push_back(theta_hat - kPi + off);
    }
    return t;
  }
  for (int k = 0;; ++k) {
    const double off = k * eps;
    if (off >= 2.0 * dtheta - 1e-12) break;
    t.push_back(theta_hat - dtheta + off);
  }
  t.push_back(theta_hat + dtheta);
  return t;
}

struct RobustResult {
  double alpha_star = 0.0;
  double secrecy_rate = 0.0;
  double worst_theta = 0.0;
  double worst_d = 0.0;
  double worst_point_eve_rate = 0.0;
  double user_rate = 0.0;
  double d_hat = 0.0;
  double theta_hat = 0.0;
  double delta_theta = 0.0;
  int num_alpha = 0;
  int num_theta = 0;
};

// Worst-case candidates over the azimuth interval, precomputed once per slot.
// sw and sa are |w_hat^H h_e|^2 and |an^H h_e|^2 for the candidate channel
// h_e = sqrt(beta_0)/d v(theta); the alpha-dependent scaling is applied by
// the caller.
struct WorstCaseCandidates {
  std::vector<double> theta;
  std::vector<double> d;
  std::vector<double> sw;
  std::vector<double> sa;
  double d_hat = 0.0;
  double theta_hat = 0.0;
  double delta_theta = 0.0;
  double user_gain = 0.0;     // |h_u|^2
  double user_leakage = 0.0;  // |an^H h_u|^2
};

inline WorstCaseCandidates worst_case_candidates(const ScenarioConfig& cfg, const AbsPose& pose,
                                                 const UncertaintyState& u, double r_e, double eps_theta) {
  WorstCaseCandidates c;
  const ChannelVec h_u = channel(cfg, pose, cfg.q_u);
  const ChannelVec h_hat = channel(cfg, pose, u.center);
  const CVec w_hat = h_u.entries / h_u.entries.norm();
  const CVec an = h_hat.entries / h_hat.entries.norm();
  c.d_hat = h_hat.distance;
  c.theta_hat = h_hat.theta;
  c.delta_theta = delta_theta(c.d_hat, r_e);
  c.user_gain = h_u.entries.squaredNorm();
  c.user_leakage = std::norm(an.dot(h_u.entries));
  c.theta = theta_grid(c.theta_hat, c.delta_theta, eps_theta);
  const std::size_t m = c.theta.size();
  c.d.resize(m);
  c.sw.resize(m);
  c.sa.resize(m);
  const double amp = std::sqrt(cfg.beta_0);
  for (std::size_t k = 0; k < m; ++k) {
    const double d = worst_distance(c.d_hat, c.theta_hat, c.theta[k], r_e);
    const CVec h_e = steering(cfg, c.theta[k]) * (amp / d);
    c.d[k] = d;
    c.sw[k] = std::norm(w_hat.dot(h_e));
    c.sa[k] = std::norm(an.dot(h_e));
  }
  return c;
}

// Max-min power split: exhaustive search over alpha in the outer loop and the
// worst-case azimuth in the inner loop. Ties go to the smaller alpha.
inline RobustResult robust_power_allocation(const ScenarioConfig& cfg, const AbsPose& pose,
                                            const UncertaintyState& u, double r_e, const SolverGrid& grid) {
  const WorstCaseCandidates c = worst_case_candidates(cfg, pose, u, r_e, grid.eps_theta);
  const std::vector<double> alphas = alpha_grid(grid.eps_alpha);
  const double P = cfg.P_com_max;
  const std::size_t m = c.theta.size();

  RobustResult best;
  best.d_hat = c.d_hat;
  best.theta_hat = c.theta_hat;
  best.delta_theta = c.delta_theta;
  best.num_alpha = static_cast<int>(alphas.size());
  best.num_theta = static_cast<int>(m);
  bool have_best = false;

  for (const double alpha : alphas) {
    const double s_u = (1.0 - alpha) * P * c.user_gain / (alpha * P * c.user_leakage + cfg.sigma_u2);
    // min over theta of [R_u - R_e]^+ is attained where the eavesdropper SINR peaks.
    double s_e_max = -1.0;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const double s_e = (1.0 - alpha) * P * c.sw[k] / (alpha * P * c.sa[k] + cfg.sigma_e2);
      if (s_e > s_e_max) {
        s_e_max = s_e;
        arg = k;
        if (s_e_max >= s_u) break;  // secrecy already zero for this alpha
      }
    }
    const double r_u = std::log2(1.0 + s_u);
    const double r_e_rate = std::log2(1.0 + s_e_max);
    const double worst = std::max(r_u - r_e_rate, 0.0);
    if (!have_best || worst > best.secrecy_rate + 1e-12) {
      have_best = true;
      best.alpha_star = alpha;
      best.secrecy_rate = worst;
      best.worst_theta = c.theta[arg];
      best.worst_d = c.d[arg];
      best.worst_point_eve_rate = r_e_rate;
      best.user_rate = r_u;
    }
  }
  return best;
}

inline RobustResult robust_power_allocation(const ScenarioConfig& cfg, const AbsPose& pose,
                                            const UncertaintyState& u, double r_e) {
  return robust_power_allocation(cfg, pose, u, r_e, SolverGrid::from(cfg));
}

// Worst-case secrecy rate of a communication slot and the power split that
// achieves it. Sensing slots carry no secrecy and must not call this.
inline std::pair<double, double> worst_case_secrecy(const ScenarioConfig& cfg, const AbsPose& pose,
                                                    const UncertaintyState& u, double r_e) {
  const RobustResult r = robust_power_allocation(cfg, pose, u, r_e);
  return {r.secrecy_rate, r.alpha_star};
}

}  // namespace tdjsarc
