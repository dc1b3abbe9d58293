#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "ftq/control/indi.hpp"
#include "ftq/control/inner_loop.hpp"
#include "ftq/control/reduced_attitude.hpp"
#include "ftq/core/lowpass.hpp"
#include "ftq/vehicle/params.hpp"
#include "ftq/vehicle/rotors.hpp"

namespace ftq {

struct IndiSetup {
  VehicleParams params{};
  FailureConfig failure{};
  InnerGains gains{};
  LowPassConfig filter{};
  ActuatorConfig actuator{};
  double period = 1.0 / 500.0;
};

/// Altitude and y2 = h1 cos(chi) + h2 sin(chi) through the two remaining
/// opposing rotors. h1/h2 orthogonal to x_S are left as internal dynamics.
class DoubleFailureIndi final : public InnerLoop {
 public:
  explicit DoubleFailureIndi(const IndiSetup& s)
      : s_(s), active_(s.failure.active_indices()), memory_(s.filter, s.period, 2),
        y2_rate_(memory_.make_derivative()) {
    s_.failure.validate();
    if (s_.failure.mode != FailureMode::DoubleOpposing) {
      throw ValidationError("controller", "double-failure INDI needs a double_opposing failure");
    }
  }

  std::string name() const override { return "indi"; }
  void set_chi_abs(double chi_abs) override { s_.gains.chi_abs = chi_abs; }
  double chi_abs() const override { return s_.gains.chi_abs; }
  double chi() const { return s_.failure.s_l * s_.gains.chi_abs; }
  /// Added to the pseudo-input before inversion; lets tests step nu directly.
  void set_nu_offset(const Vec2& d) { nu_offset_ = d; }

  ControlOutput update(const SensorFrame& m, const InnerReference& ref) override {
    const ReducedAttitude ra = reduced_attitude(m.attitude, ref.n_d, ref.n_d_rate);
    const double chi_v = chi();
    const double y2 = output_y2(ra.h, chi_v);
    const double y2_rate = output_y2_rate(ra, m.gyro, chi_v);

    const auto f = memory_.step(measured_u(m, active_), m.accel.z(), m.attitude(2, 2), ra.h.z());
    const Vec2 y_ddot_f(altitude_accel_estimate(f.az, f.r33, s_.params.gravity), y2_rate_.step(y2_rate));
    const Eigen::Vector4d xi(m.position.z(), m.velocity.z(), y2, y2_rate);
    const Vec2 nu = pseudo_input_drf(xi, ref.z, ref.z_rate, ref.z_accel, s_.gains) + nu_offset_;
    const Vec2 u_f = f.u;

    ControlOutput out;
    out.h = ra.h;
    out.y2 = y2;
    out.nu = nu;
    out.y_ddot_f = y_ddot_f;
    out.u_f = u_f;
    try {
      const Mat2 b = control_effectiveness_drf(s_.params, f.r33, f.h3, s_.gains.chi_abs);
      out.B = b;
      out.u = indi_law<2>(b, nu, y_ddot_f, u_f);
      out.omega_cmd = rotor_commands_from_u(out.u, active_, s_.actuator);
      last_cmd_ = out.omega_cmd;
    } catch (const SingularEffectiveness&) {
      out.held = true;
      out.u = u_f;
      out.omega_cmd = last_cmd_;
    }
    return out;
  }

 private:
  IndiSetup s_;
  std::vector<int> active_;
  IndiMemory memory_;
  FilteredDerivative y2_rate_;
  RotorArray last_cmd_{};
  Vec2 nu_offset_ = Vec2::Zero();
};

/// Three-output law for a single lost rotor: altitude plus h1, h2 tracking
/// the body-fixed target n_body.
class SingleFailureIndi final : public InnerLoop {
 public:
  explicit SingleFailureIndi(const IndiSetup& s, Vec3 n_body = Vec3(0.0, 0.0, -1.0))
      : s_(s), active_(s.failure.active_indices()), memory_(s.filter, s.period, 3),
        h1_rate_(memory_.make_derivative()), h2_rate_(memory_.make_derivative()), n_body_(n_body.normalized()) {
    s_.failure.validate();
    if (s_.failure.mode != FailureMode::SingleRotor) {
      throw ValidationError("controller", "single-failure INDI needs a single_rotor failure");
    }
  }

  std::string name() const override { return "indi"; }
  Vec3 n_body() const override { return n_body_; }

  ControlOutput update(const SensorFrame& m, const InnerReference& ref) override {
    const ReducedAttitude ra = reduced_attitude(m.attitude, ref.n_d, ref.n_d_rate, n_body_);
    const Vec3 hd = reduced_attitude_rate(ra, m.gyro);
    const auto f = memory_.step(measured_u(m, active_), m.accel.z(), m.attitude(2, 2), ra.h.z());

    const Eigen::Vector3d y_ddot_f(altitude_accel_estimate(f.az, f.r33, s_.params.gravity), h1_rate_.step(hd.x()),
                                   h2_rate_.step(hd.y()));
    const double y2 = ra.h.x() - n_body_.x(), y3 = ra.h.y() - n_body_.y();
    const auto& g = s_.gains;
    const Eigen::Vector3d nu(
        -g.k_zp * (m.position.z() - ref.z) - g.k_zd * (m.velocity.z() - ref.z_rate) + ref.z_accel,
        -g.k_ap * y2 - g.k_ad * hd.x(), -g.k_ap * y3 - g.k_ad * hd.y());
    const Eigen::Vector3d u_f = f.u;

    ControlOutput out;
    out.h = ra.h;
    out.y2 = y2;
    out.nu = nu;
    out.y_ddot_f = y_ddot_f;
    out.u_f = u_f;
    try {
      const Eigen::Matrix3d b = effectiveness(f.r33, f.h3);
      out.B = b;
      out.u = indi_law<3>(b, nu, y_ddot_f, u_f);
      out.omega_cmd = rotor_commands_from_u(out.u, active_, s_.actuator);
      last_cmd_ = out.omega_cmd;
    } catch (const SingularEffectiveness&) {
      out.held = true;
      out.u = u_f;
      out.omega_cmd = last_cmd_;
    }
    return out;
  }

  Eigen::Matrix3d effectiveness(double r33_f, double h3_f) const {
    if (std::abs(r33_f) < kEffectivenessEps || std::abs(h3_f) < kEffectivenessEps) {
      throw SingularEffectiveness("R33 or h3 vanished");
    }
    const Eigen::Matrix4d full = full_effectiveness(s_.params, r33_f, h3_f);
    Eigen::Matrix3d b;
    for (int c = 0; c < 3; ++c) b.col(c) = full.col(active_[static_cast<std::size_t>(c)]).head<3>();
    return b;
  }

 private:
  IndiSetup s_;
  std::vector<int> active_;
  IndiMemory memory_;
  FilteredDerivative h1_rate_, h2_rate_;
  Vec3 n_body_;
  RotorArray last_cmd_{};
};

/// Four-output law for the healthy vehicle: altitude, h1, h2 and yaw rate,
/// with a PD yaw-angle loop producing the yaw-rate reference.
class NominalIndi final : public InnerLoop {
 public:
  explicit NominalIndi(const IndiSetup& s)
      : s_(s), active_(s.failure.active_indices()), memory_(s.filter, s.period, 4),
        h1_rate_(memory_.make_derivative()), h2_rate_(memory_.make_derivative()),
        r_rate_(memory_.make_derivative()) {
    s_.failure.validate();
    if (s_.failure.mode != FailureMode::Nominal) {
      throw ValidationError("controller", "nominal INDI needs four active rotors");
    }
  }

  std::string name() const override { return "indi"; }

  /// r_ref = -k_p e_psi - k_d e_psi'.
  static double yaw_rate_reference(double yaw_error, double yaw_error_rate, const InnerGains& g) {
    return -g.k_p_psi * yaw_error - g.k_d_psi * yaw_error_rate;
  }

  ControlOutput update(const SensorFrame& m, const InnerReference& ref) override {
    const ReducedAttitude ra = reduced_attitude(m.attitude, ref.n_d, ref.n_d_rate);
    const Vec3 hd = reduced_attitude_rate(ra, m.gyro);
    const auto f = memory_.step(measured_u(m, active_), m.accel.z(), m.attitude(2, 2), ra.h.z());
    const Eigen::Vector4d y_ddot_f(altitude_accel_estimate(f.az, f.r33, s_.params.gravity), h1_rate_.step(hd.x()),
                                   h2_rate_.step(hd.y()), r_rate_.step(m.gyro.z()));

    const RotMat& r = m.attitude;
    const double yaw = std::atan2(r(1, 0), r(0, 0));
    const double roll = std::atan2(r(2, 1), r(2, 2));
    const double pitch = -std::asin(std::clamp(r(2, 0), -1.0, 1.0));
    const double yaw_rate = (m.gyro.y() * std::sin(roll) + m.gyro.z() * std::cos(roll)) / std::cos(pitch);
    const auto& g = s_.gains;
    const double r_ref = yaw_rate_reference(wrap_angle(yaw - ref.yaw), yaw_rate, g);
    const Eigen::Vector4d nu(
        -g.k_zp * (m.position.z() - ref.z) - g.k_zd * (m.velocity.z() - ref.z_rate) + ref.z_accel,
        -g.k_ap * ra.h.x() - g.k_ad * hd.x(), -g.k_ap * ra.h.y() - g.k_ad * hd.y(), g.k_r * (r_ref - m.gyro.z()));
    const Eigen::Vector4d u_f = f.u;

    ControlOutput out;
    out.h = ra.h;
    out.y2 = ra.h.x();
    out.nu = nu;
    out.y_ddot_f = y_ddot_f;
    out.u_f = u_f;
    try {
      if (std::abs(f.r33) < kEffectivenessEps || std::abs(f.h3) < kEffectivenessEps) {
        throw SingularEffectiveness("R33 or h3 vanished");
      }
      const Eigen::Matrix4d b = full_effectiveness(s_.params, f.r33, f.h3);
      out.B = b;
      out.u = indi_law<4>(b, nu, y_ddot_f, u_f);
      out.omega_cmd = rotor_commands_from_u(out.u, active_, s_.actuator);
      last_cmd_ = out.omega_cmd;
    } catch (const SingularEffectiveness&) {
      out.held = true;
      out.u = u_f;
      out.omega_cmd = last_cmd_;
    }
    return out;
  }

 private:
  IndiSetup s_;
  std::vector<int> active_;
  IndiMemory memory_;
  FilteredDerivative h1_rate_, h2_rate_, r_rate_;
  RotorArray last_cmd_{};
};

}  // namespace ftq
