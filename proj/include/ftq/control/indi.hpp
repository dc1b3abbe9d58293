#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ftq/control/reduced_attitude.hpp"
#include "ftq/core/lowpass.hpp"
#include "ftq/core/math.hpp"
#include "ftq/sim/sensors.hpp"
#include "ftq/vehicle/params.hpp"
#include "ftq/vehicle/rotors.hpp"

namespace ftq {

/// The effectiveness matrix cannot be inverted at the current state. Inner
/// loops catch this and hold the previous command.
class SingularEffectiveness : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InnerGains {
  double k_ap = 50.0;  // 1/s^2
  double k_ad = 30.0;  // 1/s
  double k_zp = 15.0;  // 1/s^2
  double k_zd = 10.0;  // 1/s
  double chi_abs = deg2rad(105.0);
  double k_p_psi = 5.0;  // nominal yaw, 1/s
  double k_d_psi = 1.0;
  double k_r = 10.0;     // yaw-rate tracking, 1/s
};

/// Commands and diagnostics of one inner-loop evaluation. Vectors are sized
/// by the number of active rotors / controlled outputs.
struct ControlOutput {
  RotorArray omega_cmd{};
  Eigen::VectorXd u;         // rotor speed squared, active rotors in index order
  Eigen::VectorXd u_f;
  Eigen::VectorXd nu;
  Eigen::VectorXd y_ddot_f;
  Eigen::MatrixXd B;
  Vec3 h = Vec3(0.0, 0.0, -1.0);
  double y2 = 0.0;
  bool held = false;
};

/// Rows: effect of each rotor's speed squared on (Z'', h1'', h2'', r').
/// h1'' = -h3 q' and h2'' = h3 p' to first order about the current state.
inline Eigen::Matrix4d full_effectiveness(const VehicleParams& p, double r33, double h3) {
  const double k = p.thrust_coeff;
  const double sb = std::sin(p.arm_angle), cb = std::cos(p.arm_angle);
  Eigen::Matrix4d b;
  for (int i = 0; i < 4; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    b(0, i) = -k * r33 / p.mass;
    b(1, i) = -h3 * k * p.arm * cb * kPitchSign[ui] / p.Iy;
    b(2, i) = h3 * k * p.arm * sb * kRollSign[ui] / p.Ix;
    b(3, i) = k * p.drag_ratio * kYawSign[ui] / p.Iz;
  }
  return b;
}

inline constexpr double kEffectivenessEps = 1e-9;

/// [[B1, B1], [B2, -B2]] for the two remaining opposing rotors.
inline Mat2 control_effectiveness_drf(const VehicleParams& p, double r33_f, double h3_f, double chi_abs) {
  const double zeta = p.zeta();
  const double s = std::sin(zeta - chi_abs);
  if (std::abs(r33_f) < kEffectivenessEps) throw SingularEffectiveness("thrust direction horizontal (R33 = 0)");
  if (std::abs(h3_f) < kEffectivenessEps) throw SingularEffectiveness("n_d perpendicular to thrust (h3 = 0)");
  if (std::abs(s) < kEffectivenessEps) throw SingularEffectiveness("|chi| equals zeta: no effectiveness on y2");
  const double b1 = -p.thrust_coeff * r33_f / p.mass;
  const double b2 = -(h3_f * p.thrust_coeff * p.arm * std::sin(p.arm_angle) / (p.Ix * std::cos(zeta))) * s;
  Mat2 b;
  b << b1, b1, b2, -b2;
  return b;
}

/// u = B^-1 (nu - y''_f) + u_f. Rejects B whose determinant is below 1e-8
/// relative to the product of its row norms.
template <int N>
Eigen::Matrix<double, N, 1> indi_law(const Eigen::Matrix<double, N, N>& b, const Eigen::Matrix<double, N, 1>& nu,
                                     const Eigen::Matrix<double, N, 1>& y_ddot_f,
                                     const Eigen::Matrix<double, N, 1>& u_f) {
  double scale = 1.0;
  for (int i = 0; i < N; ++i) scale *= b.row(i).norm();
  const double det = b.determinant();
  if (!(scale > 0.0) || !(std::abs(det) > 1e-8 * scale)) {
    throw SingularEffectiveness("effectiveness matrix is rank deficient");
  }
  return b.inverse() * (nu - y_ddot_f) + u_f;
}

/// Altitude PD plus attitude PD on (xi3, xi4) = (y2, y2').
inline Vec2 pseudo_input_drf(const Eigen::Vector4d& xi, double z_ref, double z_rate_ref, double z_accel_ref,
                             const InnerGains& g) {
  return {-g.k_zp * (xi(0) - z_ref) - g.k_zd * (xi(1) - z_rate_ref) + z_accel_ref,
          -g.k_ap * xi(2) - g.k_ad * xi(3)};
}

/// Z'' from the filtered accelerometer z axis: a_z R33 + g.
inline double altitude_accel_estimate(double az_f, double r33_f, double gravity) { return az_f * r33_f + gravity; }

/// Low-pass filters a signal and backward-differences the filtered value
/// over one sample period. The first sample primes the filter.
class FilteredDerivative {
 public:
  FilteredDerivative() = default;
  explicit FilteredDerivative(const LowPassFilter2& f) : filter_(f) {}

  double step(double sample) {
    if (!primed_) {
      filter_.reset(sample);
      previous_ = sample;
      primed_ = true;
      return 0.0;
    }
    const double y = filter_.step(sample);
    const double d = (y - previous_) / filter_.period();
    previous_ = y;
    return d;
  }

  double filtered() const { return filter_.value(); }

 private:
  LowPassFilter2 filter_{};
  double previous_ = 0.0;
  bool primed_ = false;
};

/// Synchronized filter set for the incremental law: one filter per active
/// rotor's speed squared plus accelerometer z, R33 and h3. All share one
/// cutoff so the input and output channels see the same delay.
class IndiMemory {
 public:
  IndiMemory(const LowPassConfig& cfg, double period, int n_inputs) {
    const LowPassFilter2 proto = LowPassFilter2::from_config(cfg, period);
    u_.assign(static_cast<std::size_t>(n_inputs), proto);
    az_ = r33_ = h3_ = proto;
    prototype_ = proto;
  }

  FilteredDerivative make_derivative() const { return FilteredDerivative(prototype_); }

  struct Filtered {
    Eigen::VectorXd u;
    double az = 0.0;
    double r33 = 0.0;
    double h3 = 0.0;
  };

  Filtered step(const Eigen::VectorXd& u, double az, double r33, double h3) {
    Filtered out;
    out.u.resize(u.size());
    if (!primed_) {
      for (std::size_t i = 0; i < u_.size(); ++i) u_[i].reset(u(static_cast<Eigen::Index>(i)));
      az_.reset(az);
      r33_.reset(r33);
      h3_.reset(h3);
      primed_ = true;
    } else {
      for (std::size_t i = 0; i < u_.size(); ++i) u_[i].step(u(static_cast<Eigen::Index>(i)));
      az_.step(az);
      r33_.step(r33);
      h3_.step(h3);
    }
    for (std::size_t i = 0; i < u_.size(); ++i) out.u(static_cast<Eigen::Index>(i)) = u_[i].value();
    out.az = az_.value();
    out.r33 = r33_.value();
    out.h3 = h3_.value();
    return out;
  }

  double period() const { return prototype_.period(); }

 private:
  std::vector<LowPassFilter2> u_;
  LowPassFilter2 az_, r33_, h3_, prototype_;
  bool primed_ = false;
};

/// Rotor speed commands from speed-squared commands; u is clamped into the
/// actuator envelope before the square root.
inline RotorArray rotor_commands_from_u(const Eigen::VectorXd& u, const std::vector<int>& active,
                                        const ActuatorConfig& act) {
  RotorArray cmd{};
  const double lo = act.min_speed * act.min_speed, hi = act.max_speed * act.max_speed;
  for (std::size_t k = 0; k < active.size(); ++k) {
    const double uk = u(static_cast<Eigen::Index>(k));
    cmd[static_cast<std::size_t>(active[k])] = std::sqrt(std::clamp(std::isfinite(uk) ? uk : hi, lo, hi));
  }
  return cmd;
}

inline Eigen::VectorXd measured_u(const SensorFrame& m, const std::vector<int>& active) {
  Eigen::VectorXd u(static_cast<Eigen::Index>(active.size()));
  for (std::size_t k = 0; k < active.size(); ++k) {
    const double w = m.rotor_speeds[static_cast<std::size_t>(active[k])];
    u(static_cast<Eigen::Index>(k)) = w * w;
  }
  return u;
}

}  // namespace ftq
