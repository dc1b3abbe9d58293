#pragma once

#include "ftq/core/math.hpp"
#include "ftq/vehicle/aero.hpp"
#include "ftq/vehicle/params.hpp"
#include "ftq/vehicle/rotors.hpp"

namespace ftq {

/// Resultant body force: thrust along -z_B from the active rotors plus F_a.
inline Vec3 body_force(const VehicleParams& p, const RotorBank& rotors, const Vec3& aero_force) {
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (rotors.active[i]) sum_sq += rotors.speed[i] * rotors.speed[i];
  }
  return Vec3(0.0, 0.0, -p.thrust_coeff * sum_sq) + aero_force;
}

/// Resultant body moment: allocation, rotor gyroscopic and spin-up terms, yaw
/// damping and M_a. Inactive rotors are excluded from every sum.
inline Vec3 body_moment(const VehicleParams& p, const RotorBank& rotors, const RotorArray& rotor_accels,
                        const Vec3& omega, const Vec3& aero_moment) {
  const double sb = std::sin(p.arm_angle), cb = std::cos(p.arm_angle);
  Vec3 alloc = Vec3::Zero();
  double spin_sum = 0.0, spin_accel_sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!rotors.active[i]) continue;
    const double w = rotors.speed[i];
    const double f = p.thrust_coeff * w * w;
    alloc += f * Vec3(kRollSign[i] * p.arm * sb, kPitchSign[i] * p.arm * cb, kYawSign[i] * p.drag_ratio);
    spin_sum += kYawSign[i] * w;
    spin_accel_sum += kYawSign[i] * rotor_accels[i];
  }
  const Vec3 gyro(p.Ip * omega.y() * spin_sum, -p.Ip * omega.x() * spin_sum, p.Ip * spin_accel_sum);
  const Vec3 damping(0.0, 0.0, -p.yaw_damping * omega.z());
  return alloc + gyro + damping + aero_moment;
}

}  // namespace ftq
