#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "ftq/core/math.hpp"
#include "ftq/vehicle/params.hpp"

namespace ftq {

/// Coefficients of eta1 = r + mu1 Vz + mu2 p + mu3 q for the single-rotor
/// failure, chosen so that eta1' carries no rotor input.
struct SrfMu {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu3 = 0.0;
};

/// Effect of each active rotor's speed squared on (r', Vz', p', q').
inline Eigen::Matrix<double, 4, 3> srf_input_map(const VehicleParams& p, const FailureConfig& f, double r33) {
  const auto act = f.active_indices();
  if (act.size() != 3) throw ValidationError("failure", "single-rotor analysis needs three active rotors");
  Eigen::Matrix<double, 4, 3> m;
  for (int c = 0; c < 3; ++c) {
    const auto i = static_cast<std::size_t>(act[static_cast<std::size_t>(c)]);
    m(0, c) = p.drag_ratio * p.thrust_coeff * kYawSign[i] / p.Iz;
    m(1, c) = -p.thrust_coeff * r33 / p.mass;
    m(2, c) = p.thrust_coeff * p.arm * std::sin(p.arm_angle) * kRollSign[i] / p.Ix;
    m(3, c) = p.thrust_coeff * p.arm * std::cos(p.arm_angle) * kPitchSign[i] / p.Iy;
  }
  return m;
}

/// Solves [1, mu1, mu2, mu3] M = 0.
inline SrfMu srf_mu(const VehicleParams& p, const FailureConfig& f, double r33 = 1.0) {
  const auto m = srf_input_map(p, f, r33);
  const Eigen::Matrix3d lhs = m.bottomRows<3>().transpose();
  const Eigen::Vector3d rhs = -m.row(0).transpose();
  Eigen::FullPivLU<Eigen::Matrix3d> lu(lhs);
  if (!lu.isInvertible()) throw std::domain_error("srf_mu: input map is rank deficient");
  const Eigen::Vector3d mu = lu.solve(rhs);
  return {mu(0), mu(1), mu(2)};
}

struct SrfZeroDynamics {
  double theta = 1.0;
  double pi = 0.0;
  double h3 = -1.0;
  double gamma_over_iz = 0.0;
  double g_mu1 = 0.0;

  /// eta1' = -(gamma / (Iz Theta)) eta1 + Pi eta1^2 / (h3 Theta^2) + g mu1.
  double rate(double eta1) const {
    return -gamma_over_iz / theta * eta1 + pi * eta1 * eta1 / (h3 * theta * theta) + g_mu1;
  }

  /// Root that tends to g mu1 Iz Theta / gamma as Pi -> 0.
  double equilibrium() const {
    const double a = pi / (h3 * theta * theta);
    const double b = -gamma_over_iz / theta;
    const double disc = b * b - 4.0 * a * g_mu1;
    if (disc < 0.0) throw std::domain_error("srf zero dynamics: no real equilibrium");
    return 2.0 * g_mu1 / (-b + std::sqrt(disc));
  }

  double slope(double eta1) const {
    return -gamma_over_iz / theta + 2.0 * pi * eta1 / (h3 * theta * theta);
  }
};

/// Zero dynamics with (h1, h2) held at (n_x, n_y); h3 = n_z of the body
/// target and R33 = -h3 with n_d pointing up.
inline SrfZeroDynamics zero_dynamics_srf(const VehicleParams& p, const FailureConfig& f, const Vec3& n_body) {
  const Vec3 n = n_body.normalized();
  const double h3 = n.z();
  if (std::abs(h3) < 1e-9) throw std::domain_error("zero_dynamics_srf: h3 vanishes");
  const SrfMu mu = srf_mu(p, f, -h3);
  SrfZeroDynamics z;
  z.h3 = h3;
  z.theta = 1.0 + (n.x() * mu.mu2 + n.y() * mu.mu3) / h3;
  if (std::abs(z.theta) < 1e-12) throw std::domain_error("zero_dynamics_srf: Theta vanishes");
  z.pi = p.Az() * n.x() * n.y() / h3 + p.Ax() * n.y() * mu.mu2 + p.Ay() * n.x() * mu.mu3;
  z.gamma_over_iz = p.yaw_damping / p.Iz;
  z.g_mu1 = p.gravity * mu.mu1;
  return z;
}

}  // namespace ftq
