#pragma once

#include <cmath>

#include "ftq/core/math.hpp"

namespace ftq {

enum class DragLaw { Linear, Quadratic };

/// Parametric stand-in for the unmodeled aerodynamic force and moment.
/// Drag acts on the body-frame relative airspeed; the moment is a bias, an
/// optional sinusoid, and a rotor-flapping term proportional to airspeed.
struct AeroDisturbance {
  bool enabled = false;
  DragLaw law = DragLaw::Linear;
  Vec3 drag = Vec3::Constant(0.1);      // N s/m (linear) or N s^2/m^2 (quadratic), body axes
  Vec3 moment_bias = Vec3::Zero();      // N m
  Vec3 moment_amplitude = Vec3::Zero(); // N m
  double moment_frequency_hz = 0.0;
  double flapping_moment = 0.0;         // N m per m/s of body-frame airspeed
};

struct AeroLoads {
  Vec3 force = Vec3::Zero();   // N, body frame
  Vec3 moment = Vec3::Zero();  // N m, body frame
};

inline AeroLoads aero_eval(const AeroDisturbance& d, const RotMat& r, const Vec3& velocity,
                           const Vec3& /*omega*/, const Vec3& wind, double t = 0.0) {
  AeroLoads out;
  if (!d.enabled) return out;
  const Vec3 airspeed_body = r.transpose() * (velocity - wind);
  if (d.law == DragLaw::Linear) {
    out.force = -d.drag.cwiseProduct(airspeed_body);
  } else {
    out.force = -d.drag.cwiseProduct(airspeed_body) * airspeed_body.norm();
  }
  out.moment = d.moment_bias;
  if (d.moment_frequency_hz > 0.0) {
    out.moment += d.moment_amplitude * std::sin(2.0 * kPi * d.moment_frequency_hz * t);
  } else {
    out.moment += d.moment_amplitude;
  }
  // Discs tilt away from the relative wind: moment about z_B x v_rel.
  out.moment += d.flapping_moment * Vec3::UnitZ().cross(airspeed_body);
  return out;
}

}  // namespace ftq
