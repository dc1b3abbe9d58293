#pragma once

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "ftq/control/indi.hpp"
#include "ftq/control/outer_loop.hpp"
#include "ftq/core/lowpass.hpp"
#include "ftq/lqr/baseline.hpp"
#include "ftq/scenario/reference.hpp"
#include "ftq/sim/sensors.hpp"
#include "ftq/vehicle/aero.hpp"
#include "ftq/vehicle/params.hpp"
#include "ftq/vehicle/rotors.hpp"

namespace ftq {

/// A config problem located in the source text (1-based line, 0 if unknown).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& msg)
      : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct LossOfControl {
  double tilt = 0.95;          // |(h1 - n_x, h2 - n_y)|
  double tilt_time = 0.3;      // s
  double position_error = 10.0;  // m
  double saturation_time = 1.0;  // s at the upper speed limit

  void validate() const {
    if (!(tilt > 0.0)) throw ValidationError("sim.loss_of_control.tilt", "must be > 0");
    if (!(tilt_time >= 0.0)) throw ValidationError("sim.loss_of_control.tilt_time", "must be >= 0");
    if (!(position_error > 0.0)) throw ValidationError("sim.loss_of_control.position_error", "must be > 0");
    if (!(saturation_time >= 0.0)) throw ValidationError("sim.loss_of_control.saturation_time", "must be >= 0");
  }
};

struct SimConfig {
  double dt = 0.0005;
  double controller_rate = 500.0;  // Hz
  double position_rate = 120.0;    // Hz
  double log_rate = 100.0;         // Hz
  unsigned long long seed = 1;
  SensorNoise noise{};
  LossOfControl loc{};
  ActuatorConfig actuator{};

  int steps_per(double rate) const { return std::max(1, static_cast<int>(std::lround(1.0 / (rate * dt)))); }

  void validate() const {
    if (!(dt > 0.0)) throw ValidationError("sim.dt", "must be > 0");
    if (!(controller_rate > 0.0) || controller_rate > 1.0 / dt + 1e-9) {
      throw ValidationError("sim.controller_rate_hz", "must be positive and at most 1/dt");
    }
    if (!(position_rate > 0.0)) throw ValidationError("sim.position_rate_hz", "must be > 0");
    if (!(log_rate > 0.0) || log_rate > 1.0 / dt + 1e-9) {
      throw ValidationError("sim.log_rate_hz", "must be positive and at most 1/dt");
    }
    loc.validate();
    actuator.validate();
  }
};

enum class ControllerKind { Indi, Lqr };

struct Config {
  VehicleParams vehicle{};
  FailureConfig failure = FailureConfig::double_opposing(1);
  SimConfig sim{};
  LowPassConfig filter{};
  ControllerKind controller = ControllerKind::Indi;
  Vec3 n_body = Vec3(0.0, 0.0, -1.0);
  OuterGains outer{};
  InnerGains inner{};
  LqrWeights baseline{};
  AeroDisturbance disturbance{};
  ScenarioSpec scenario{};
  Vec3 initial_position = Vec3::Zero();
  Vec3 initial_velocity = Vec3::Zero();

  void validate() const {
    vehicle.validate();
    failure.validate();
    sim.validate();
    if (!(filter.cutoff_hz > 0.0)) throw ValidationError("filter.cutoff_hz", "must be > 0");
    if (!(filter.damping > 0.0)) throw ValidationError("filter.damping", "must be > 0");
    if (!(outer.kp > 0.0 && outer.ki >= 0.0 && outer.kd > 0.0)) {
      throw ValidationError("gains.outer", "kp, kd must be > 0 and ki >= 0");
    }
    if (!(inner.k_ap > 0.0 && inner.k_ad > 0.0 && inner.k_zp > 0.0 && inner.k_zd > 0.0)) {
      throw ValidationError("gains.inner", "all gains must be > 0");
    }
    if (std::abs(std::sin(inner.chi_abs - vehicle.zeta())) < 1e-6) {
      throw ValidationError("gains.chi_deg", "|chi| equals zeta + k*180 deg (singular output direction)");
    }
    if (!(n_body.norm() > 0.0)) throw ValidationError("controller.n_body", "must be non-zero");
    baseline.validate();
    scenario.validate();
    if (controller == ControllerKind::Lqr && failure.mode != FailureMode::DoubleOpposing) {
      throw ValidationError("controller.type", "lqr supports only the double_opposing failure");
    }
  }
};

namespace detail {

class YamlReader {
 public:
  explicit YamlReader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
    throw ConfigError(source_, n.Mark().line >= 0 ? n.Mark().line + 1 : 0, msg);
  }

  void require_map(const YAML::Node& n, const std::string& path) const {
    if (!n.IsMap()) fail(n, path + " must be a mapping");
  }

  void allow_keys(const YAML::Node& n, const std::string& path, std::initializer_list<const char*> keys) const {
    require_map(n, path);
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) fail(kv.first, "unknown key '" + (path.empty() ? key : path + "." + key) + "'");
    }
  }

  double real(const YAML::Node& n, const std::string& path) const {
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) fail(n, path + " must be finite");
      return v;
    } catch (const YAML::Exception&) {
      fail(n, path + " must be a number");
    }
  }

  void opt(const YAML::Node& parent, const char* key, const std::string& path, double& out) const {
    if (const auto n = parent[key]) out = real(n, path + "." + key);
  }

  void opt_deg(const YAML::Node& parent, const char* key, const std::string& path, double& out_rad) const {
    if (const auto n = parent[key]) out_rad = deg2rad(real(n, path + "." + key));
  }

  void opt_bool(const YAML::Node& parent, const char* key, const std::string& path, bool& out) const {
    if (const auto n = parent[key]) {
      try {
        out = n.as<bool>();
      } catch (const YAML::Exception&) {
        fail(n, path + "." + key + " must be true or false");
      }
    }
  }

  std::string str(const YAML::Node& n, const std::string& path) const {
    if (!n.IsScalar()) fail(n, path + " must be a string");
    return n.as<std::string>();
  }

  Vec3 vec3(const YAML::Node& n, const std::string& path) const {
    if (n.IsScalar()) {
      const double v = real(n, path);
      return Vec3::Constant(v);
    }
    if (!n.IsSequence() || n.size() != 3) fail(n, path + " must be a list of three numbers");
    return {real(n[0], path), real(n[1], path), real(n[2], path)};
  }

  std::vector<int> ints(const YAML::Node& n, const std::string& path) const {
    if (!n.IsSequence()) fail(n, path + " must be a list of integers");
    std::vector<int> out;
    for (const auto& e : n) {
      try {
        out.push_back(e.as<int>());
      } catch (const YAML::Exception&) {
        fail(e, path + " must be a list of integers");
      }
    }
    return out;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

}  // namespace detail

/// Parses and validates a scenario config. Missing keys keep their defaults.
inline Config parse_config_text(const std::string& text, const std::string& source = "<config>") {
  detail::YamlReader y(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, e.mark.line + 1, e.msg);
  }
  Config c;
  if (root.IsNull()) {
    c.validate();
    return c;
  }
  y.allow_keys(root, "",
               {"vehicle", "failure", "sim", "filter", "controller", "gains", "baseline", "disturbance", "scenario",
                "initial"});

  if (const auto v = root["vehicle"]) {
    y.allow_keys(v, "vehicle",
                 {"Ix", "Iy", "Iz", "Ip", "mass", "arm", "beta_deg", "yaw_damping", "thrust_coeff", "drag_ratio",
                  "gravity"});
    auto& p = c.vehicle;
    y.opt(v, "Ix", "vehicle", p.Ix);
    y.opt(v, "Iy", "vehicle", p.Iy);
    y.opt(v, "Iz", "vehicle", p.Iz);
    y.opt(v, "Ip", "vehicle", p.Ip);
    y.opt(v, "mass", "vehicle", p.mass);
    y.opt(v, "arm", "vehicle", p.arm);
    y.opt_deg(v, "beta_deg", "vehicle", p.arm_angle);
    y.opt(v, "yaw_damping", "vehicle", p.yaw_damping);
    y.opt(v, "thrust_coeff", "vehicle", p.thrust_coeff);
    y.opt(v, "drag_ratio", "vehicle", p.drag_ratio);
    y.opt(v, "gravity", "vehicle", p.gravity);
  }

  if (const auto f = root["failure"]) {
    y.allow_keys(f, "failure", {"mode", "remaining", "failed"});
    const std::string mode = f["mode"] ? y.str(f["mode"], "failure.mode") : "double_opposing";
    if (mode == "double_opposing") {
      int first = 1;
      if (const auto r = f["remaining"]) {
        const auto v = y.ints(r, "failure.remaining");
        if (v == std::vector<int>{1, 3} || v == std::vector<int>{3, 1}) {
          first = 1;
        } else if (v == std::vector<int>{2, 4} || v == std::vector<int>{4, 2}) {
          first = 2;
        } else {
          y.fail(r, "failure.remaining must be [1, 3] or [2, 4]");
        }
      }
      c.failure = FailureConfig::double_opposing(first);
    } else if (mode == "single_rotor") {
      int failed = 4;
      if (const auto r = f["failed"]) {
        try {
          failed = r.as<int>();
        } catch (const YAML::Exception&) {
          y.fail(r, "failure.failed must be an integer");
        }
        if (failed < 1 || failed > 4) y.fail(r, "failure.failed must be 1..4");
      }
      c.failure = FailureConfig::single_rotor(failed);
    } else if (mode == "nominal") {
      c.failure = FailureConfig::nominal();
    } else {
      y.fail(f["mode"], "failure.mode must be double_opposing, single_rotor or nominal");
    }
  }

  if (const auto s = root["sim"]) {
    y.allow_keys(s, "sim",
                 {"dt", "controller_rate_hz", "position_rate_hz", "log_rate_hz", "seed", "noise", "loss_of_control",
                  "actuator"});
    y.opt(s, "dt", "sim", c.sim.dt);
    y.opt(s, "controller_rate_hz", "sim", c.sim.controller_rate);
    y.opt(s, "position_rate_hz", "sim", c.sim.position_rate);
    y.opt(s, "log_rate_hz", "sim", c.sim.log_rate);
    if (const auto n = s["seed"]) {
      try {
        c.sim.seed = n.as<unsigned long long>();
      } catch (const YAML::Exception&) {
        y.fail(n, "sim.seed must be a non-negative integer");
      }
    }
    if (const auto n = s["noise"]) {
      y.allow_keys(n, "sim.noise", {"enabled", "gyro", "accel", "rotor", "position"});
      y.opt_bool(n, "enabled", "sim.noise", c.sim.noise.enabled);
      y.opt(n, "gyro", "sim.noise", c.sim.noise.gyro);
      y.opt(n, "accel", "sim.noise", c.sim.noise.accel);
      y.opt(n, "rotor", "sim.noise", c.sim.noise.rotor);
      y.opt(n, "position", "sim.noise", c.sim.noise.position);
    }
    if (const auto n = s["loss_of_control"]) {
      y.allow_keys(n, "sim.loss_of_control", {"tilt", "tilt_time", "position_error", "saturation_time"});
      y.opt(n, "tilt", "sim.loss_of_control", c.sim.loc.tilt);
      y.opt(n, "tilt_time", "sim.loss_of_control", c.sim.loc.tilt_time);
      y.opt(n, "position_error", "sim.loss_of_control", c.sim.loc.position_error);
      y.opt(n, "saturation_time", "sim.loss_of_control", c.sim.loc.saturation_time);
    }
    if (const auto n = s["actuator"]) {
      y.allow_keys(n, "sim.actuator", {"time_constant", "min_speed", "max_speed"});
      y.opt(n, "time_constant", "sim.actuator", c.sim.actuator.time_constant);
      y.opt(n, "min_speed", "sim.actuator", c.sim.actuator.min_speed);
      y.opt(n, "max_speed", "sim.actuator", c.sim.actuator.max_speed);
    }
  }

  if (const auto f = root["filter"]) {
    y.allow_keys(f, "filter", {"cutoff_hz", "damping"});
    y.opt(f, "cutoff_hz", "filter", c.filter.cutoff_hz);
    y.opt(f, "damping", "filter", c.filter.damping);
  }

  if (const auto n = root["controller"]) {
    y.allow_keys(n, "controller", {"type", "n_body"});
    if (const auto t = n["type"]) {
      const auto v = y.str(t, "controller.type");
      if (v == "indi") {
        c.controller = ControllerKind::Indi;
      } else if (v == "lqr") {
        c.controller = ControllerKind::Lqr;
      } else {
        y.fail(t, "controller.type must be indi or lqr");
      }
    }
    if (const auto b = n["n_body"]) c.n_body = y.vec3(b, "controller.n_body");
  }

  if (const auto g = root["gains"]) {
    y.allow_keys(g, "gains", {"outer", "inner", "chi_deg", "yaw"});
    if (const auto o = g["outer"]) {
      y.allow_keys(o, "gains.outer", {"kp", "ki", "kd", "integral_limit"});
      y.opt(o, "kp", "gains.outer", c.outer.kp);
      y.opt(o, "ki", "gains.outer", c.outer.ki);
      y.opt(o, "kd", "gains.outer", c.outer.kd);
      y.opt(o, "integral_limit", "gains.outer", c.outer.integral_limit);
    }
    if (const auto i = g["inner"]) {
      y.allow_keys(i, "gains.inner", {"k_ap", "k_ad", "k_zp", "k_zd"});
      y.opt(i, "k_ap", "gains.inner", c.inner.k_ap);
      y.opt(i, "k_ad", "gains.inner", c.inner.k_ad);
      y.opt(i, "k_zp", "gains.inner", c.inner.k_zp);
      y.opt(i, "k_zd", "gains.inner", c.inner.k_zd);
    }
    y.opt_deg(g, "chi_deg", "gains", c.inner.chi_abs);
    if (const auto w = g["yaw"]) {
      y.allow_keys(w, "gains.yaw", {"k_p_psi", "k_d_psi", "k_r"});
      y.opt(w, "k_p_psi", "gains.yaw", c.inner.k_p_psi);
      y.opt(w, "k_d_psi", "gains.yaw", c.inner.k_d_psi);
      y.opt(w, "k_r", "gains.yaw", c.inner.k_r);
    }
  }

  if (const auto b = root["baseline"]) {
    y.allow_keys(b, "baseline", {"q_attitude", "q_rate", "r_input", "actuator_states"});
    y.opt(b, "q_attitude", "baseline", c.baseline.q_attitude);
    y.opt(b, "q_rate", "baseline", c.baseline.q_rate);
    y.opt(b, "r_input", "baseline", c.baseline.r_input);
    y.opt_bool(b, "actuator_states", "baseline", c.baseline.actuator_states);
  }

  if (const auto d = root["disturbance"]) {
    y.allow_keys(d, "disturbance",
                 {"enabled", "law", "drag", "moment_bias", "moment_amplitude", "moment_frequency_hz",
                  "flapping_moment"});
    auto& a = c.disturbance;
    y.opt_bool(d, "enabled", "disturbance", a.enabled);
    if (const auto l = d["law"]) {
      const auto v = y.str(l, "disturbance.law");
      if (v == "linear") {
        a.law = DragLaw::Linear;
      } else if (v == "quadratic") {
        a.law = DragLaw::Quadratic;
      } else {
        y.fail(l, "disturbance.law must be linear or quadratic");
      }
    }
    if (const auto n = d["drag"]) a.drag = y.vec3(n, "disturbance.drag");
    if (const auto n = d["moment_bias"]) a.moment_bias = y.vec3(n, "disturbance.moment_bias");
    if (const auto n = d["moment_amplitude"]) a.moment_amplitude = y.vec3(n, "disturbance.moment_amplitude");
    y.opt(d, "moment_frequency_hz", "disturbance", a.moment_frequency_hz);
    y.opt(d, "flapping_moment", "disturbance", a.flapping_moment);
  }

  if (const auto s = root["scenario"]) {
    y.allow_keys(s, "scenario",
                 {"kind", "duration", "smoothing", "origin", "yaw_deg", "step", "waypoints", "dwell", "wind",
                  "chi_switch", "sweep"});
    auto& sc = c.scenario;
    if (const auto k = s["kind"]) {
      const auto v = y.str(k, "scenario.kind");
      if (v == "hover") {
        sc.kind = ScenarioKind::Hover;
      } else if (v == "step_transfer") {
        sc.kind = ScenarioKind::StepTransfer;
      } else if (v == "waypoint_track") {
        sc.kind = ScenarioKind::WaypointTrack;
        sc.smoothing = 1.0;
      } else if (v == "wind_ramp") {
        sc.kind = ScenarioKind::WindRamp;
      } else if (v == "chi_switch") {
        sc.kind = ScenarioKind::ChiSwitch;
      } else if (v == "chi_sweep") {
        sc.kind = ScenarioKind::ChiSweep;
      } else {
        y.fail(k, "scenario.kind must be hover, step_transfer, waypoint_track, wind_ramp, chi_switch or chi_sweep");
      }
    }
    y.opt(s, "duration", "scenario", sc.duration);
    y.opt(s, "smoothing", "scenario", sc.smoothing);
    if (const auto n = s["origin"]) sc.origin = y.vec3(n, "scenario.origin");
    y.opt_deg(s, "yaw_deg", "scenario", sc.yaw);
    if (const auto n = s["step"]) {
      y.allow_keys(n, "scenario.step", {"delta", "time"});
      if (const auto d = n["delta"]) sc.step = y.vec3(d, "scenario.step.delta");
      y.opt(n, "time", "scenario.step", sc.step_time);
    }
    if (const auto n = s["waypoints"]) {
      if (!n.IsSequence()) y.fail(n, "scenario.waypoints must be a list of [x, y, z] points");
      sc.waypoints.clear();
      for (const auto& w : n) sc.waypoints.push_back(y.vec3(w, "scenario.waypoints"));
    }
    y.opt(s, "dwell", "scenario", sc.dwell);
    if (const auto n = s["wind"]) {
      y.allow_keys(n, "scenario.wind", {"start", "end", "rate", "ramp_start", "direction"});
      y.opt(n, "start", "scenario.wind", sc.wind_start);
      y.opt(n, "end", "scenario.wind", sc.wind_end);
      y.opt(n, "rate", "scenario.wind", sc.wind_rate);
      y.opt(n, "ramp_start", "scenario.wind", sc.ramp_start);
      if (const auto d = n["direction"]) sc.wind_direction = y.vec3(d, "scenario.wind.direction");
    }
    if (const auto n = s["chi_switch"]) {
      y.allow_keys(n, "scenario.chi_switch", {"chi_deg", "time"});
      if (const auto v = n["chi_deg"]) {
        if (!v.IsSequence()) y.fail(v, "scenario.chi_switch.chi_deg must be a list");
        sc.chi_values.clear();
        for (const auto& e : v) sc.chi_values.push_back(deg2rad(y.real(e, "scenario.chi_switch.chi_deg")));
      }
      y.opt(n, "time", "scenario.chi_switch", sc.switch_time);
    }
    if (const auto n = s["sweep"]) {
      y.allow_keys(n, "scenario.sweep", {"step_deg"});
      y.opt(n, "step_deg", "scenario.sweep", sc.sweep_step_deg);
    }
  }

  if (const auto i = root["initial"]) {
    y.allow_keys(i, "initial", {"position", "velocity"});
    if (const auto n = i["position"]) c.initial_position = y.vec3(n, "initial.position");
    if (const auto n = i["velocity"]) c.initial_velocity = y.vec3(n, "initial.velocity");
  }

  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(source, 0, std::string("validation failed: ") + e.what());
  }
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace ftq
