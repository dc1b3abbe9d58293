#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "ftq/analysis/stability.hpp"
#include "ftq/control/indi.hpp"
#include "ftq/control/inner_loop.hpp"
#include "ftq/control/reduced_attitude.hpp"
#include "ftq/lqr/riccati.hpp"
#include "ftq/vehicle/params.hpp"
#include "ftq/vehicle/rotors.hpp"

namespace ftq {

struct LqrWeights {
  double q_attitude = 20.0;  // on h1, h2
  double q_rate = 0.0;       // on p, q
  double r_input = 1.0;      // 1/N^2
  double time_constant = 0.030;
  bool actuator_states = true;

  void validate() const {
    if (!(q_attitude >= 0.0)) throw ValidationError("baseline.q_attitude", "must be >= 0");
    if (!(q_rate >= 0.0)) throw ValidationError("baseline.q_rate", "must be >= 0");
    if (!(r_input > 0.0)) throw ValidationError("baseline.r_input", "must be > 0");
    if (actuator_states && !(time_constant > 0.0)) {
      throw ValidationError("baseline.time_constant", "actuator states need a positive time constant");
    }
  }
};

/// Linear model of (h1, h2, p, q[, df1, df2]) driven by thrust deviations [N]
/// of the two remaining rotors about the spinning hover.
struct LinearModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  double r_bar = 0.0;
  double thrust_trim = 0.0;  // per rotor, N
  std::vector<int> active;
};

/// Nonlinear reduced dynamics used for the linearization. `x` holds
/// (h1, h2, p, q[, df1, df2]) and `u` the commanded thrust deviations.
inline Eigen::VectorXd relaxed_hover_rhs(const VehicleParams& p, const std::vector<int>& active, double r_bar,
                                         double thrust_trim, double tau, bool actuator_states,
                                         const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  const double h1 = x(0), h2 = x(1), pp = x(2), q = x(3);
  const double h3 = -std::sqrt(std::max(0.0, 1.0 - h1 * h1 - h2 * h2));
  const double sb = std::sin(p.arm_angle), cb = std::cos(p.arm_angle);
  double roll = 0.0, pitch = 0.0, spin = 0.0;
  for (std::size_t k = 0; k < active.size(); ++k) {
    const auto i = static_cast<std::size_t>(active[k]);
    const double df = actuator_states ? x(4 + static_cast<Eigen::Index>(k)) : u(static_cast<Eigen::Index>(k));
    const double f = thrust_trim + df;
    roll += kRollSign[i] * p.arm * sb * f;
    pitch += kPitchSign[i] * p.arm * cb * f;
    spin += kYawSign[i] * std::sqrt(std::max(f, 0.0) / p.thrust_coeff);
  }
  Eigen::VectorXd d(x.size());
  d(0) = r_bar * h2 - q * h3;
  d(1) = -r_bar * h1 + pp * h3;
  d(2) = p.Ax() * q * r_bar + p.ax() * q * spin + roll / p.Ix;
  d(3) = p.Ay() * r_bar * pp - p.ay() * pp * spin + pitch / p.Iy;
  if (actuator_states) {
    for (Eigen::Index k = 0; k < u.size(); ++k) d(4 + k) = (u(k) - x(4 + k)) / tau;
  }
  return d;
}

/// Central-difference Jacobians at h = [0, 0, -1], p = q = 0, r = r_bar.
inline LinearModel linearize_relaxed_hover(const VehicleParams& p, const FailureConfig& f, const TrimEquilibrium& t,
                                           const LqrWeights& w, double step = 1e-6) {
  if (f.mode != FailureMode::DoubleOpposing) {
    throw ValidationError("controller", "the LQR baseline is designed for the double_opposing failure");
  }
  LinearModel m;
  m.active = f.active_indices();
  m.r_bar = t.r_bar;
  m.thrust_trim = p.mass * p.gravity / static_cast<double>(m.active.size());
  const Eigen::Index nx = w.actuator_states ? 6 : 4, nu = 2;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(nx), u0 = Eigen::VectorXd::Zero(nu);
  auto rhs = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    return relaxed_hover_rhs(p, m.active, m.r_bar, m.thrust_trim, w.time_constant, w.actuator_states, x, u);
  };
  m.A.resize(nx, nx);
  m.B.resize(nx, nu);
  for (Eigen::Index j = 0; j < nx; ++j) {
    const double h = j < 4 ? step : step * m.thrust_trim;
    Eigen::VectorXd a = x0, b = x0;
    a(j) += h;
    b(j) -= h;
    m.A.col(j) = (rhs(a, u0) - rhs(b, u0)) / (2.0 * h);
  }
  for (Eigen::Index j = 0; j < nu; ++j) {
    const double h = step * m.thrust_trim;
    Eigen::VectorXd a = u0, b = u0;
    a(j) += h;
    b(j) -= h;
    m.B.col(j) = (rhs(x0, a) - rhs(x0, b)) / (2.0 * h);
  }
  return m;
}

struct LqrGain {
  Eigen::MatrixXd K;
  Eigen::MatrixXd P;
  LinearModel model;
  double residual = 0.0;
};

inline LqrGain solve_lqr(const LinearModel& m, const LqrWeights& w) {
  w.validate();
  const Eigen::Index nx = m.A.rows();
  Eigen::VectorXd qd = Eigen::VectorXd::Zero(nx);
  qd(0) = qd(1) = w.q_attitude;
  qd(2) = qd(3) = w.q_rate;
  const Eigen::MatrixXd q = qd.asDiagonal();
  const Eigen::MatrixXd r = w.r_input * Eigen::MatrixXd::Identity(m.B.cols(), m.B.cols());
  const CareSolution s = solve_care(m.A, m.B, q, r);
  if (!is_hurwitz(m.A - m.B * s.K)) throw RiccatiFailure("solve_lqr: closed loop is not Hurwitz");
  return {s.K, s.P, m, s.residual};
}

struct DiscreteModel {
  Eigen::MatrixXd Ad;
  Eigen::MatrixXd Bd;
};

/// Zero-order-hold discretization through the exponential of [[A, B], [0, 0]].
inline DiscreteModel discretize_zoh(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double period) {
  const Eigen::Index n = a.rows(), k = b.cols();
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(n + k, n + k);
  big.topLeftCorner(n, n) = a * period;
  big.topRightCorner(n, k) = b * period;
  const Eigen::MatrixXd e = big.exp();
  return {e.topLeftCorner(n, n), e.topRightCorner(n, k)};
}

/// u = u_trim - K (x - x_trim).
inline Eigen::VectorXd lqr_step(const Eigen::MatrixXd& k, const Eigen::VectorXd& x, const Eigen::VectorXd& x_trim,
                                const Eigen::VectorXd& u_trim) {
  return u_trim - k * (x - x_trim);
}

/// Attitude LQR about the spinning hover plus the shared altitude PD for the
/// collective thrust.
class LqrInnerLoop final : public InnerLoop {
 public:
  LqrInnerLoop(const VehicleParams& p, const FailureConfig& f, const InnerGains& gains, const LqrWeights& w,
               const ActuatorConfig& act)
      : p_(p), f_(f), gains_(gains), act_(act), gain_(solve_lqr(linearize_relaxed_hover(p, f, trim(p, f), w), w)),
        actuator_states_(w.actuator_states) {}

  std::string name() const override { return "lqr"; }
  const LqrGain& gain() const { return gain_; }

  ControlOutput update(const SensorFrame& m, const InnerReference& ref) override {
    const ReducedAttitude ra = reduced_attitude(m.attitude, ref.n_d, ref.n_d_rate);
    const auto& act = gain_.model.active;
    const double r33 = std::max(m.attitude(2, 2), 0.2);
    const double nu1 = -gains_.k_zp * (m.position.z() - ref.z) - gains_.k_zd * (m.velocity.z() - ref.z_rate) +
                       ref.z_accel;
    const double collective = p_.mass * (p_.gravity - nu1) / r33;
    const double share = collective / static_cast<double>(act.size());

    const Eigen::Index nx = gain_.K.cols();
    Eigen::VectorXd x(nx);
    x(0) = ra.h.x();
    x(1) = ra.h.y();
    x(2) = m.gyro.x();
    x(3) = m.gyro.y();
    if (actuator_states_) {
      for (std::size_t k = 0; k < act.size(); ++k) {
        const double w = m.rotor_speeds[static_cast<std::size_t>(act[k])];
        x(4 + static_cast<Eigen::Index>(k)) = p_.thrust_coeff * w * w - share;
      }
    }
    const Eigen::VectorXd df = lqr_step(gain_.K, x, Eigen::VectorXd::Zero(nx), Eigen::VectorXd::Zero(2));

    ControlOutput out;
    out.h = ra.h;
    out.y2 = output_y2(ra.h, f_.s_l * gains_.chi_abs);
    out.nu = Eigen::Vector2d(nu1, 0.0);
    out.u.resize(2);
    for (std::size_t k = 0; k < act.size(); ++k) {
      const auto ki = static_cast<Eigen::Index>(k);
      out.u(ki) = std::max(share + df(ki), 0.0) / p_.thrust_coeff;
    }
    out.omega_cmd = rotor_commands_from_u(out.u, act, act_);
    return out;
  }

 private:
  VehicleParams p_;
  FailureConfig f_;
  InnerGains gains_;
  ActuatorConfig act_;
  LqrGain gain_;
  bool actuator_states_;
};

}  // namespace ftq
