#pragma once

#include <cmath>

#include "ftq/core/math.hpp"

namespace ftq {

/// Desired thrust direction seen from the body: h = R^T n_d, and
/// lambda = R^T dn_d/dt. `n_body` is the body-fixed vector to align.
struct ReducedAttitude {
  Vec3 h = Vec3(0.0, 0.0, -1.0);
  Vec3 lambda = Vec3::Zero();
  Vec3 n_body = Vec3(0.0, 0.0, -1.0);
};

inline ReducedAttitude reduced_attitude(const RotMat& r, const Vec3& n_d_inertial, const Vec3& n_d_rate_inertial,
                                        const Vec3& n_body = Vec3(0.0, 0.0, -1.0)) {
  return {r.transpose() * n_d_inertial, r.transpose() * n_d_rate_inertial, n_body};
}

/// dh/dt = -Omega x h + lambda.
inline Vec3 reduced_attitude_rate(const ReducedAttitude& ra, const Vec3& omega) {
  return -omega.cross(ra.h) + ra.lambda;
}

/// Recomputes h from the attitude rather than integrating its rate.
inline ReducedAttitude reduced_attitude_step(const ReducedAttitude& ra, const RotMat& r, const Vec3& n_d_inertial,
                                             const Vec3& n_d_rate_inertial) {
  return reduced_attitude(r, n_d_inertial, n_d_rate_inertial, ra.n_body);
}

/// Projection of n_d onto x_S, the body x axis rotated by chi about z_B.
inline double output_y2(const Vec3& h, double chi) { return h.x() * std::cos(chi) + h.y() * std::sin(chi); }

inline double output_y2_rate(const ReducedAttitude& ra, const Vec3& omega, double chi) {
  const Vec3 hd = reduced_attitude_rate(ra, omega);
  return hd.x() * std::cos(chi) + hd.y() * std::sin(chi);
}

/// Projection of n_d onto y_S; the uncontrolled internal state.
inline double internal_eta1(const Vec3& h, double chi) { return -h.x() * std::sin(chi) + h.y() * std::cos(chi); }

}  // namespace ftq
