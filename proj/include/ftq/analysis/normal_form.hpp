#pragma once

#include <cmath>

#include "ftq/analysis/stability.hpp"
#include "ftq/core/math.hpp"
#include "ftq/vehicle/params.hpp"

namespace ftq {

/// Inner-loop state with n_d = [0, 0, -1] fixed: altitude channel, the
/// reduced attitude h and body rates.
struct InnerState {
  double Z = 0.0;
  double Vz = 0.0;
  Vec3 h = Vec3(0.0, 0.0, -1.0);
  Vec3 omega = Vec3::Zero();  // p, q, r
};

struct NormalCoords {
  Eigen::Vector4d xi = Eigen::Vector4d::Zero();  // Z, Vz, y2, y2'
  Vec3 eta = Vec3::Zero();
};

/// Fixed rotor speeds and chi for the transform; chi = s_l |chi|.
struct NormalFormContext {
  VehicleParams params{};
  FailureConfig failure{};
  double chi_abs = deg2rad(105.0);
  double omega_bar = 0.0;  // rotor speed used in the gyroscopic drift

  double chi() const { return failure.s_l * chi_abs; }
  double mu(double h3) const { return params.mass * params.drag_ratio / (params.Iz * h3); }
  double spin_sum() const { return -failure.s_n * 2.0 * omega_bar; }
};

inline NormalFormContext make_normal_form_context(const VehicleParams& p, const FailureConfig& f, double chi_abs) {
  return {p, f, chi_abs, trim(p, f).omega_bar};
}

/// Input-free part of the inner-loop dynamics, rotors held at omega_bar.
inline InnerState inner_drift(const NormalFormContext& c, const InnerState& x) {
  const auto& p = c.params;
  const double pp = x.omega.x(), q = x.omega.y(), r = x.omega.z();
  const double h1 = x.h.x(), h2 = x.h.y(), h3 = x.h.z();
  const double w = c.spin_sum();
  InnerState d;
  d.Z = x.Vz;
  d.Vz = p.gravity;
  d.h = Vec3(r * h2 - q * h3, -r * h1 + pp * h3, q * h1 - pp * h2);
  d.omega = Vec3(p.Ax() * q * r + p.ax() * q * w, p.Ay() * r * pp - p.ay() * pp * w,
                 p.Az() * pp * q - p.yaw_damping * r / p.Iz);
  return d;
}

inline void require_domain(const NormalFormContext& c, double h3) {
  const double s = chi_singularity(c.params, c.chi_abs);
  if (!(std::abs(h3 * s) > 1e-12)) throw SingularDirection("normal form: h3 sin(|chi| - zeta) vanishes");
}

inline NormalCoords to_normal_form(const NormalFormContext& c, const InnerState& x) {
  require_domain(c, x.h.z());
  const double chi = c.chi(), zeta = c.params.zeta();
  const double h1 = x.h.x(), h2 = x.h.y(), h3 = x.h.z();
  const double pp = x.omega.x(), q = x.omega.y(), r = x.omega.z();
  NormalCoords n;
  const double eta1 = -h1 * std::sin(chi) + h2 * std::cos(chi);
  n.xi << x.Z, x.Vz, h1 * std::cos(chi) + h2 * std::sin(chi),
      r * eta1 + h3 * (pp * std::sin(chi) - q * std::cos(chi));
  n.eta << eta1, h3 * (q * std::cos(zeta) - c.failure.s_l * pp * std::sin(zeta)),
      r + c.failure.s_n * c.mu(h3) * x.Vz;
  return n;
}

/// Inverse map; `h3_sign` picks the hemisphere of h (-1 near hover).
inline InnerState from_normal_form(const NormalCoords& n, const NormalFormContext& c, double h3_sign = -1.0) {
  const double chi = c.chi(), zeta = c.params.zeta(), ca = c.chi_abs;
  const double y2 = n.xi(2), eta1 = n.eta(0);
  InnerState x;
  x.Z = n.xi(0);
  x.Vz = n.xi(1);
  const double h1 = y2 * std::cos(chi) - eta1 * std::sin(chi);
  const double h2 = y2 * std::sin(chi) + eta1 * std::cos(chi);
  const double rest = 1.0 - h1 * h1 - h2 * h2;
  if (rest < 0.0) throw InputError("from_normal_form: |(h1, h2)| exceeds 1");
  const double h3 = (h3_sign < 0.0 ? -1.0 : 1.0) * std::sqrt(rest);
  require_domain(c, h3);
  x.h = Vec3(h1, h2, h3);
  const double r = n.eta(2) - c.failure.s_n * c.mu(h3) * n.xi(1);
  const double a = (n.xi(3) - r * eta1) / h3;
  const double cc = n.eta(1) / h3;
  const double s = std::sin(ca - zeta);
  const double big_p = (a * std::cos(zeta) + cc * std::cos(ca)) / s;
  const double q = (a * std::sin(zeta) + cc * std::sin(ca)) / s;
  x.omega = Vec3(c.failure.s_l * big_p, q, r);
  return x;
}

/// max |T^-1(T(x)) - x| over all components.
inline double normal_form_roundtrip(const NormalFormContext& c, const InnerState& x) {
  const InnerState y = from_normal_form(to_normal_form(c, x), c, x.h.z());
  double e = std::max(std::abs(y.Z - x.Z), std::abs(y.Vz - x.Vz));
  e = std::max(e, (y.h - x.h).cwiseAbs().maxCoeff());
  return std::max(e, (y.omega - x.omega).cwiseAbs().maxCoeff());
}

/// eta' with xi pinned at zero: the internal dynamics the output feedback
/// cannot see.
inline Vec3 zero_dynamics_drf(const NormalFormContext& c, const Vec3& eta) {
  NormalCoords n;
  n.eta = eta;
  const InnerState x = from_normal_form(n, c);
  const auto& p = c.params;
  const double chi = c.chi(), zeta = c.params.zeta();
  const double h3 = x.h.z();
  const double pp = x.omega.x(), q = x.omega.y(), r = x.omega.z();
  const InnerState d = inner_drift(c, x);
  const double e1 = h3 * (q * std::sin(chi) + pp * std::cos(chi));
  const double e2 = d.h.z() * (q * std::cos(zeta) - c.failure.s_l * pp * std::sin(zeta)) +
                    h3 * (d.omega.y() * std::cos(zeta) - c.failure.s_l * d.omega.x() * std::sin(zeta));
  // The mu V_z term cancels the rotor inputs in r'; only gravity survives.
  const double e3 = p.Az() * pp * q - p.yaw_damping * r / p.Iz + c.failure.s_n * c.mu(h3) * p.gravity;
  return {e1, e2, e3};
}

/// eta3 at which the zero dynamics rest with eta1 = eta2 = 0.
inline Vec3 zero_dynamics_equilibrium(const NormalFormContext& c) {
  const auto& p = c.params;
  const double h3 = -1.0;
  return {0.0, 0.0, c.failure.s_n * c.mu(h3) * p.gravity * p.Iz / p.yaw_damping};
}

/// Central-difference Jacobian of zero_dynamics_drf, Richardson-extrapolated.
inline Mat3 zero_dynamics_jacobian_fd(const NormalFormContext& c, const Vec3& eta, double step = 1e-4) {
  Mat3 j;
  for (int k = 0; k < 3; ++k) {
    auto central = [&](double h) {
      Vec3 a = eta, b = eta;
      a(k) += h;
      b(k) -= h;
      return Vec3((zero_dynamics_drf(c, a) - zero_dynamics_drf(c, b)) / (2.0 * h));
    };
    j.col(k) = (4.0 * central(step / 2.0) - central(step)) / 3.0;
  }
  return j;
}

/// [[A1, 0], [0, -gamma/Iz]].
inline Mat3 zero_dynamics_jacobian_analytic(const NormalFormContext& c) {
  const TrimEquilibrium t = trim(c.params, c.failure);
  Mat3 j = Mat3::Zero();
  j.topLeftCorner<2, 2>() = a1(c.params, c.failure, c.chi_abs, t).a;
  j(2, 2) = -c.params.yaw_damping / c.params.Iz;
  return j;
}

}  // namespace ftq
