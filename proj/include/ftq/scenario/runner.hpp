#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ftq/analysis/srf.hpp"
#include "ftq/analysis/stability.hpp"
#include "ftq/control/indi_loops.hpp"
#include "ftq/control/inner_loop.hpp"
#include "ftq/control/outer_loop.hpp"
#include "ftq/lqr/baseline.hpp"
#include "ftq/scenario/config.hpp"
#include "ftq/scenario/reference.hpp"
#include "ftq/sim/dynamics.hpp"
#include "ftq/sim/sensors.hpp"

namespace ftq {

struct TraceRow {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 rates = Vec3::Zero();  // p, q, r
  Vec3 h = Vec3(0.0, 0.0, -1.0);
  Vec3 eta = Vec3::Zero();
  double y2 = 0.0;
  RotorArray omega_cmd{};
  RotorArray rotor_speed{};
  double wind = 0.0;
  bool crashed = false;
};

struct RunSummary {
  std::string scenario;
  std::string controller;
  double chi_deg = 0.0;
  bool crashed = false;
  std::string cause;      // tilt, position, actuator, diverged
  double crash_time = -1.0;
  double rms_error = 0.0;  // m, 3-D position error over the pre-crash rows
  Vec3 rms_axis = Vec3::Zero();
  double final_error = 0.0;
  double max_abs_eta1 = 0.0;
  double max_wind = 0.0;   // m/s
  std::size_t rows = 0;
};

struct RunResult {
  std::vector<TraceRow> trace;
  RunSummary summary;
  double max_orthonormality_error = 0.0;
};

/// Optional observer called after every inner-loop evaluation.
using ControlHook = std::function<void(const SimState&, const ControlOutput&)>;

struct RunOptions {
  ControlHook on_control;
  /// Replaces the configured inner loop when set (tests inject custom loops).
  std::function<std::unique_ptr<InnerLoop>(const Config&)> make_inner;
};

inline IndiSetup indi_setup(const Config& c) {
  IndiSetup s;
  s.params = c.vehicle;
  s.failure = c.failure;
  s.gains = c.inner;
  s.filter = c.filter;
  s.actuator = c.sim.actuator;
  s.period = c.sim.steps_per(c.sim.controller_rate) * c.sim.dt;
  return s;
}

inline std::unique_ptr<InnerLoop> make_inner_loop(const Config& c) {
  if (c.controller == ControllerKind::Lqr) {
    LqrWeights w = c.baseline;
    w.time_constant = c.sim.actuator.time_constant;
    if (!(w.time_constant > 0.0)) w.actuator_states = false;
    return std::make_unique<LqrInnerLoop>(c.vehicle, c.failure, c.inner, w, c.sim.actuator);
  }
  switch (c.failure.mode) {
    case FailureMode::DoubleOpposing: return std::make_unique<DoubleFailureIndi>(indi_setup(c));
    case FailureMode::SingleRotor: return std::make_unique<SingleFailureIndi>(indi_setup(c), c.n_body);
    case FailureMode::Nominal: return std::make_unique<NominalIndi>(indi_setup(c));
  }
  throw ValidationError("failure.mode", "unsupported");
}

/// Spinning relaxed hover for the failure cases, plain hover otherwise.
inline SimState initial_state(const Config& c) {
  const auto& p = c.vehicle;
  SimState s;
  s.position = c.initial_position + reference_at(c.scenario, 0.0).position;
  s.velocity = c.initial_velocity;
  RotorArray w{};
  switch (c.failure.mode) {
    case FailureMode::DoubleOpposing: {
      const TrimEquilibrium t = trim(p, c.failure);
      for (int i : c.failure.active_indices()) w[static_cast<std::size_t>(i)] = t.omega_bar;
      s.omega = Vec3(0.0, 0.0, t.r_bar);
      break;
    }
    case FailureMode::SingleRotor: {
      // The rotor diagonal to the failed one idles; the opposing pair lifts.
      const TrimEquilibrium t = trim(p, c.failure);
      for (int i : c.failure.active_indices()) {
        const bool pair = (c.failure.s_l == 1) ? (i == 0 || i == 2) : (i == 1 || i == 3);
        w[static_cast<std::size_t>(i)] = pair ? t.omega_bar : c.sim.actuator.min_speed;
      }
      s.omega = Vec3(0.0, 0.0, t.r_bar);
      break;
    }
    case FailureMode::Nominal: {
      const double w0 = std::sqrt(p.mass * p.gravity / (4.0 * p.thrust_coeff));
      w = {w0, w0, w0, w0};
      break;
    }
  }
  s.rotors = RotorBank::at_speed(c.failure.active, c.sim.actuator, w);
  return s;
}

/// Internal states logged alongside the trace.
inline Vec3 logged_internal_states(const Config& c, const SimState& s, const Vec3& h, double chi_abs) {
  const auto& p = c.vehicle;
  if (c.failure.mode == FailureMode::SingleRotor) {
    const SrfMu mu = srf_mu(p, c.failure, s.attitude(2, 2) == 0.0 ? 1e-9 : s.attitude(2, 2));
    return {s.omega.z() + mu.mu1 * s.velocity.z() + mu.mu2 * s.omega.x() + mu.mu3 * s.omega.y(), 0.0, 0.0};
  }
  const double chi = c.failure.s_l * chi_abs, zeta = p.zeta();
  const double h3 = std::abs(h.z()) < 1e-9 ? -1e-9 : h.z();
  const double mu = p.mass * p.drag_ratio / (p.Iz * h3);
  return {internal_eta1(h, chi),
          h3 * (s.omega.y() * std::cos(zeta) - c.failure.s_l * s.omega.x() * std::sin(zeta)),
          s.omega.z() + c.failure.s_n * mu * s.velocity.z()};
}

namespace detail {

inline void finalize_summary(const Config& c, RunResult& r) {
  auto& s = r.summary;
  double sum = 0.0;
  Vec3 sum_axis = Vec3::Zero();
  std::size_t n = 0;
  for (const auto& row : r.trace) {
    if (row.crashed) continue;
    const Vec3 e = row.position - reference_at(c.scenario, row.t).position;
    sum += e.squaredNorm();
    sum_axis += e.cwiseAbs2();
    s.max_abs_eta1 = std::max(s.max_abs_eta1, std::abs(row.eta.x()));
    s.final_error = e.norm();
    ++n;
  }
  if (n > 0) {
    s.rms_error = std::sqrt(sum / static_cast<double>(n));
    s.rms_axis = (sum_axis / static_cast<double>(n)).cwiseSqrt();
  }
  s.rows = r.trace.size();
}

}  // namespace detail

/// Runs one closed-loop scenario. A loss of control is a result, recorded in
/// the summary and as a final trace row with crashed = true.
inline RunResult run_scenario(const Config& c, const RunOptions& opt = {}) {
  const auto& p = c.vehicle;
  const auto& sc = c.scenario;
  RunResult res;
  res.summary.scenario = to_string(sc.kind);

  std::unique_ptr<InnerLoop> inner = opt.make_inner ? opt.make_inner(c) : make_inner_loop(c);
  res.summary.controller = inner->name();
  OuterLoop outer(c.outer, p.gravity);
  SensorModel sensors(c.sim.noise, c.sim.seed);

  SimState state = initial_state(c);
  const double dt = c.sim.dt;
  const int ctrl_every = c.sim.steps_per(c.sim.controller_rate);
  const int log_every = c.sim.steps_per(c.sim.log_rate);
  const double pos_period = 1.0 / c.sim.position_rate;
  const auto n_steps = static_cast<long>(std::floor(sc.duration / dt + 1e-9));
  const Vec3 n_body = inner->n_body();

  double chi_abs = chi_at(sc, 0.0, c.inner.chi_abs);
  inner->set_chi_abs(chi_abs);
  res.summary.chi_deg = rad2deg(chi_abs);

  Vec3 n_d(0.0, 0.0, -1.0);
  InnerReference iref;
  RotorArray commands = state.rotors.speed;
  ControlOutput last_out;
  last_out.omega_cmd = commands;
  long pos_index = 0;

  auto env_at = [&](double t) { return Environment{c.disturbance, wind_at(sc, t), t}; };
  Vec3 specific_force = dynamics_deriv(state, p, state.rotors.accelerations(), env_at(0.0)).specific_force;

  auto make_row = [&](const SimState& s, bool crashed) {
    TraceRow row;
    row.t = s.t;
    row.position = s.position;
    row.velocity = s.velocity;
    row.rates = s.omega;
    row.h = s.attitude.transpose() * n_d;
    row.eta = logged_internal_states(c, s, row.h, chi_abs);
    row.y2 = output_y2(row.h, c.failure.s_l * chi_abs);
    row.omega_cmd = commands;
    row.rotor_speed = s.rotors.speed;
    row.wind = wind_speed_at(sc, s.t);
    row.crashed = crashed;
    return row;
  };
  res.trace.push_back(make_row(state, false));

  double tilt_timer = 0.0;
  RotorArray sat_timer{};  // per rotor: time its command has sat at the upper limit
  auto crash = [&](const std::string& cause, double t) {
    res.summary.crashed = true;
    res.summary.cause = cause;
    res.summary.crash_time = t;
    res.summary.max_wind = wind_speed_at(sc, t);
  };

  for (long k = 0; k < n_steps && !res.summary.crashed; ++k) {
    const double t = static_cast<double>(k) * dt;
    state.t = t;

    if (t + 1e-12 >= static_cast<double>(pos_index) * pos_period) {
      sensors.sample_position(state);
      const PositionReference ref = reference_at(sc, t);
      const SensorFrame f = sensors.sample(state, specific_force);
      try {
        const OuterOutput o = outer.update(f.position, f.velocity, ref, pos_period);
        n_d = o.n_d;
      } catch (const DegenerateThrustDirection&) {
        // keep the previous direction
      }
      iref.n_d = n_d;
      iref.z = ref.position.z();
      iref.z_rate = ref.velocity.z();
      iref.z_accel = ref.acceleration.z();
      iref.yaw = sc.yaw;
      ++pos_index;
    }

    if (k % ctrl_every == 0) {
      const double chi_now = chi_at(sc, t, c.inner.chi_abs);
      if (chi_now != chi_abs) {
        chi_abs = chi_now;
        inner->set_chi_abs(chi_abs);
      }
      const SensorFrame f = sensors.sample(state, specific_force);
      last_out = inner->update(f, iref);
      commands = last_out.omega_cmd;
      if (opt.on_control) opt.on_control(state, last_out);
    }

    try {
      state = sim_step(state, p, commands, dt, c.disturbance, wind_at(sc, t), wind_at(sc, t + dt));
    } catch (const SimulationDiverged&) {
      crash("diverged", t);
      break;
    }
    state.t = static_cast<double>(k + 1) * dt;
    res.max_orthonormality_error = std::max(res.max_orthonormality_error, orthonormality_error(state.attitude));
    if ((k + 1) % ctrl_every == 0) {
      specific_force = dynamics_deriv(state, p, state.rotors.accelerations(), env_at(state.t)).specific_force;
    }

    // Loss-of-control monitor.
    const Vec3 h = state.attitude.transpose() * n_d;
    const double tilt = std::hypot(h.x() - n_body.x(), h.y() - n_body.y());
    tilt_timer = tilt > c.sim.loc.tilt ? tilt_timer + dt : 0.0;
    double pinned = 0.0;
    for (int i : c.failure.active_indices()) {
      auto& timer = sat_timer[static_cast<std::size_t>(i)];
      timer = commands[static_cast<std::size_t>(i)] >= c.sim.actuator.max_speed ? timer + dt : 0.0;
      pinned = std::max(pinned, timer);
    }
    const double pos_err = (state.position - reference_at(sc, state.t).position).norm();

    if (tilt_timer > c.sim.loc.tilt_time) {
      crash("tilt", state.t);
    } else if (pos_err > c.sim.loc.position_error) {
      crash("position", state.t);
    } else if (pinned > c.sim.loc.saturation_time) {
      crash("actuator", state.t);
    }

    if ((k + 1) % log_every == 0 && !res.summary.crashed) res.trace.push_back(make_row(state, false));
  }

  if (res.summary.crashed) {
    res.trace.push_back(make_row(state, true));
  } else {
    res.summary.max_wind = wind_speed_at(sc, state.t);
  }
  detail::finalize_summary(c, res);
  return res;
}

}  // namespace ftq
