#pragma once

#include <stdexcept>
#include <string>

#include "ftq/core/math.hpp"
#include "ftq/vehicle/aero.hpp"
#include "ftq/vehicle/forces.hpp"
#include "ftq/vehicle/params.hpp"
#include "ftq/vehicle/rotors.hpp"

namespace ftq {

/// Full simulated truth. Position and velocity are inertial (z down).
struct SimState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  RotMat attitude = RotMat::Identity();
  Vec3 omega = Vec3::Zero();
  RotorBank rotors{};
  double t = 0.0;
};

struct StateDerivative {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Mat3 attitude = Mat3::Zero();
  Vec3 omega = Vec3::Zero();
  Vec3 specific_force = Vec3::Zero();  // body frame, what an accelerometer reads
};

class SimulationDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything the environment contributes to one derivative evaluation.
struct Environment {
  AeroDisturbance disturbance{};
  Vec3 wind = Vec3::Zero();
  double t = 0.0;
};

inline StateDerivative dynamics_deriv(const SimState& s, const VehicleParams& p, const RotorArray& rotor_accels,
                                      const Environment& env) {
  const AeroLoads aero = aero_eval(env.disturbance, s.attitude, s.velocity, s.omega, env.wind, env.t);
  const Vec3 force = body_force(p, s.rotors, aero.force);
  const Vec3 moment = body_moment(p, s.rotors, rotor_accels, s.omega, aero.moment);
  const Vec3 inertia(p.Ix, p.Iy, p.Iz);

  StateDerivative d;
  d.position = s.velocity;
  d.specific_force = force / p.mass;
  d.velocity = Vec3(0.0, 0.0, p.gravity) + s.attitude * d.specific_force;
  d.attitude = s.attitude * skew(s.omega);
  const Vec3 h = inertia.cwiseProduct(s.omega);
  d.omega = (moment - s.omega.cross(h)).cwiseQuotient(inertia);
  return d;
}

/// Advances rigid-body state one step with a fourth-order Runge-Kutta
/// Munthe-Kaas scheme (attitude increments live in so(3) and are mapped back
/// through the Rodrigues exponential), then moves the rotor bank toward
/// `commands`. Rotor speeds are held over the step.
inline SimState sim_step(const SimState& s, const VehicleParams& p, const RotorArray& commands, double dt,
                         const AeroDisturbance& dist, const Vec3& wind_start, const Vec3& wind_end) {
  if (!(dt > 0.0)) throw InputError("sim_step: dt must be positive");
  RotorBank cmd_bank = s.rotors;
  cmd_bank.command = commands;
  const RotorArray accels = cmd_bank.accelerations();

  // Inverse of the right-trivialized dexp, truncated at third order in theta.
  auto dexp_inv = [](const Vec3& theta, const Vec3& w) -> Vec3 {
    return w + 0.5 * theta.cross(w) + (1.0 / 12.0) * theta.cross(theta.cross(w));
  };

  struct Stage {
    Vec3 dp, dv, dtheta, dw;
  };
  auto eval = [&](const Vec3& dpos, const Vec3& dvel, const Vec3& theta, const Vec3& dom, double frac) -> Stage {
    SimState x = s;
    x.position += dpos;
    x.velocity += dvel;
    x.attitude = s.attitude * exp_so3(theta);
    x.omega += dom;
    x.t = s.t + frac * dt;
    Environment env{dist, wind_start + frac * (wind_end - wind_start), x.t};
    const StateDerivative d = dynamics_deriv(x, p, accels, env);
    return {d.position, d.velocity, dexp_inv(theta, x.omega), d.omega};
  };

  const Stage k1 = eval(Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), 0.0);
  const Stage k2 = eval(0.5 * dt * k1.dp, 0.5 * dt * k1.dv, 0.5 * dt * k1.dtheta, 0.5 * dt * k1.dw, 0.5);
  const Stage k3 = eval(0.5 * dt * k2.dp, 0.5 * dt * k2.dv, 0.5 * dt * k2.dtheta, 0.5 * dt * k2.dw, 0.5);
  const Stage k4 = eval(dt * k3.dp, dt * k3.dv, dt * k3.dtheta, dt * k3.dw, 1.0);

  SimState n = s;
  const double w6 = dt / 6.0;
  n.position += w6 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
  n.velocity += w6 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  const Vec3 theta = w6 * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta);
  n.omega += w6 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
  n.attitude = integrate_rotation(s.attitude, theta / dt, dt);
  n.rotors = rotor_step(s.rotors, commands, dt);
  n.t = s.t + dt;

  if (!n.position.allFinite() || !n.velocity.allFinite() || !n.omega.allFinite() || !n.attitude.allFinite()) {
    throw SimulationDiverged("non-finite state at t=" + std::to_string(n.t));
  }
  return n;
}

}  // namespace ftq
