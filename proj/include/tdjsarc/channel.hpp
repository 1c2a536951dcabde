#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Core>

#include "tdjsarc/config.hpp"
#include "tdjsarc/errors.hpp"
#include "tdjsarc/scenario.hpp"
#include "tdjsarc/units.hpp"

namespace tdjsarc {

using CVec = Eigen::VectorXcd;

// Half-wavelength ULA response over the M_c communication elements.
// Entry k is exp(-j k pi sin(theta)).
inline CVec steering(int num_elements, double theta) {
  CVec v(num_elements);
  const std::complex<double> step = std::polar(1.0, -kPi * std::sin(theta));
  std::complex<double> e(1.0, 0.0);
  for (int k = 0; k < num_elements; ++k) {
    v[k] = e;
    e *= step;
  }
  return v;
}

inline CVec steering(const ScenarioConfig& cfg, double theta) { return steering(cfg.M_c(), theta); }

// Angle between the direction to q and the array broadside, in (-pi, pi].
inline double azimuth(const AbsPose& pose, const Vec3& q) {
  const Vec3 d = q - pose.q_a;
  if (d.norm() < 1e-12) throw DomainError("azimuth: point coincides with the ABS");
  double theta = std::atan2(d.dot(pose.e_t), d.dot(pose.e_perp));
  if (theta <= -kPi) theta = kPi;
  return theta;
}

struct ChannelVec {
  CVec entries;
  Vec3 to_point = Vec3::Zero();
  int at_slot = 0;
  double distance = 0.0;
  double theta = 0.0;
};

// LoS free-space channel sqrt(beta_0)/d * v(theta).
inline ChannelVec channel(const ScenarioConfig& cfg, const AbsPose& pose, const Vec3& q) {
  ChannelVec h;
  h.theta = azimuth(pose, q);
  h.distance = (pose.q_a - q).norm();
  h.entries = steering(cfg, h.theta) * (std::sqrt(cfg.beta_0) / h.distance);
  h.to_point = q;
  h.at_slot = pose.n;
  return h;
}

}  // namespace tdjsarc
