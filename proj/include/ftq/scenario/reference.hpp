#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ftq/control/outer_loop.hpp"
#include "ftq/core/math.hpp"
#include "ftq/vehicle/params.hpp"

namespace ftq {

enum class ScenarioKind { Hover, StepTransfer, WaypointTrack, WindRamp, ChiSwitch, ChiSweep };

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Hover: return "hover";
    case ScenarioKind::StepTransfer: return "step_transfer";
    case ScenarioKind::WaypointTrack: return "waypoint_track";
    case ScenarioKind::WindRamp: return "wind_ramp";
    case ScenarioKind::ChiSwitch: return "chi_switch";
    case ScenarioKind::ChiSweep: return "chi_sweep";
  }
  return "?";
}

/// Illustrative box pattern A..G around the start point, NED metres.
inline std::vector<Vec3> default_waypoints() {
  return {Vec3(0.0, 0.0, 0.0),  Vec3(1.5, 0.0, 0.0),  Vec3(1.5, 1.5, 0.0), Vec3(0.0, 1.5, -0.5),
          Vec3(-1.5, 1.5, -0.5), Vec3(-1.5, 0.0, 0.0), Vec3(0.0, 0.0, 0.0)};
}

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::Hover;
  double duration = 10.0;   // s
  double smoothing = 0.0;   // first-order reference time constant, s; 0 = raw steps
  Vec3 origin = Vec3::Zero();
  double yaw = 0.0;         // nominal mode heading, rad

  // step_transfer
  Vec3 step = Vec3(3.0, 0.0, 0.0);
  double step_time = 1.0;

  // waypoint_track
  std::vector<Vec3> waypoints = default_waypoints();
  double dwell = 3.0;

  // wind_ramp: uniform wind along `wind_direction`, holding `wind_start`
  // until `ramp_start`, then rising at `wind_rate` up to `wind_end`.
  double wind_start = 0.0;
  double wind_end = 0.0;
  double wind_rate = 0.5;  // m/s per s
  double ramp_start = 2.0;
  Vec3 wind_direction = Vec3::UnitX();

  // chi_switch
  std::vector<double> chi_values;  // |chi|, rad
  double switch_time = 5.0;

  // chi_sweep
  double sweep_step_deg = 0.5;

  void validate() const {
    if (!(duration >= 0.0) || !std::isfinite(duration)) throw ValidationError("scenario.duration", "must be >= 0");
    if (!(smoothing >= 0.0)) throw ValidationError("scenario.smoothing", "must be >= 0");
    if (!(step_time >= 0.0)) throw ValidationError("scenario.step.time", "must be >= 0");
    if (!(dwell > 0.0)) throw ValidationError("scenario.dwell", "must be > 0");
    if (!(ramp_start >= 0.0)) throw ValidationError("scenario.wind.ramp_start", "must be >= 0");
    if (!(switch_time >= 0.0)) throw ValidationError("scenario.chi_switch.time", "must be >= 0");
    if (!(sweep_step_deg > 0.0)) throw ValidationError("scenario.sweep.step_deg", "must be > 0");
    if (!(wind_direction.norm() > 0.0)) throw ValidationError("scenario.wind.direction", "must be non-zero");
    if (kind == ScenarioKind::WindRamp && !(wind_rate > 0.0)) {
      throw ValidationError("scenario.wind.rate", "must be > 0");
    }
    for (const auto& w : waypoints) {
      if (!w.allFinite()) throw ValidationError("scenario.waypoints", "must be finite");
    }
    if (kind == ScenarioKind::WaypointTrack && waypoints.empty()) {
      throw ValidationError("scenario.waypoints", "need at least one waypoint");
    }
    if (kind == ScenarioKind::ChiSwitch && chi_values.size() != 2) {
      throw ValidationError("scenario.chi_switch.chi_deg", "need exactly two values");
    }
  }
};

/// Response of the reference smoother to a unit step at t = 0.
struct SmoothedStep {
  double value = 0.0, rate = 0.0, accel = 0.0;
};

inline SmoothedStep smoothed_step(double t, double tau) {
  if (t < 0.0) return {};
  if (tau <= 0.0) return {1.0, 0.0, 0.0};
  const double e = std::exp(-t / tau);
  return {1.0 - e, e / tau, -e / (tau * tau)};
}

/// Position reference as a pure function of time, so metrics can be
/// recomputed from a trace.
inline PositionReference reference_at(const ScenarioSpec& s, double t) {
  PositionReference r;
  r.position = s.origin;
  auto add_step = [&](const Vec3& delta, double t0) {
    const SmoothedStep st = smoothed_step(t - t0, s.smoothing);
    r.position += st.value * delta;
    r.velocity += st.rate * delta;
    r.acceleration += st.accel * delta;
  };
  switch (s.kind) {
    case ScenarioKind::StepTransfer:
      add_step(s.step, s.step_time);
      break;
    case ScenarioKind::WaypointTrack:
      r.position += s.waypoints.front();
      for (std::size_t k = 1; k < s.waypoints.size(); ++k) {
        add_step(s.waypoints[k] - s.waypoints[k - 1], s.dwell * static_cast<double>(k));
      }
      break;
    default:
      break;
  }
  return r;
}

inline double wind_speed_at(const ScenarioSpec& s, double t) {
  if (s.kind != ScenarioKind::WindRamp) return 0.0;
  if (t <= s.ramp_start) return s.wind_start;
  const double dir = s.wind_end >= s.wind_start ? 1.0 : -1.0;
  const double w = s.wind_start + dir * s.wind_rate * (t - s.ramp_start);
  return dir > 0.0 ? std::min(w, s.wind_end) : std::max(w, s.wind_end);
}

inline Vec3 wind_at(const ScenarioSpec& s, double t) { return wind_speed_at(s, t) * s.wind_direction.normalized(); }

/// |chi| in force at time t, or `fallback` when the scenario does not
/// schedule it.
inline double chi_at(const ScenarioSpec& s, double t, double fallback) {
  if (s.kind != ScenarioKind::ChiSwitch || s.chi_values.size() != 2) return fallback;
  return t < s.switch_time ? s.chi_values[0] : s.chi_values[1];
}

}  // namespace ftq
