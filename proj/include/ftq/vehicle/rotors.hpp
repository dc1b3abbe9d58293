#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "ftq/core/math.hpp"
#include "ftq/vehicle/params.hpp"

namespace ftq {

using RotorArray = std::array<double, 4>;

struct ActuatorConfig {
  double time_constant = 0.030;  // s; zero models an ideal actuator
  double min_speed = 200.0;      // rad/s
  double max_speed = 1256.0;     // rad/s

  void validate() const {
    if (!(time_constant >= 0.0)) throw ValidationError("actuator.time_constant", "must be >= 0");
    if (!(min_speed >= 0.0)) throw ValidationError("actuator.min_speed", "must be >= 0");
    if (!(max_speed > min_speed)) throw ValidationError("actuator.max_speed", "must exceed min_speed");
  }
};

/// Rotor speeds with first-order lag and saturation. Inactive rotors stay at 0.
struct RotorBank {
  RotorArray speed{};
  RotorArray command{};
  std::array<bool, 4> active = {true, true, true, true};
  ActuatorConfig actuator{};

  double clamp_speed(double w) const { return std::clamp(w, actuator.min_speed, actuator.max_speed); }

  /// Rotor angular accelerations implied by the current commands.
  RotorArray accelerations() const {
    RotorArray a{};
    if (actuator.time_constant <= 0.0) return a;
    for (std::size_t i = 0; i < 4; ++i) {
      if (active[i]) a[i] = (clamp_speed(command[i]) - speed[i]) / actuator.time_constant;
    }
    return a;
  }

  static RotorBank at_speed(const std::array<bool, 4>& active, const ActuatorConfig& act, const RotorArray& w) {
    RotorBank b;
    b.active = active;
    b.actuator = act;
    for (std::size_t i = 0; i < 4; ++i) {
      b.speed[i] = active[i] ? b.clamp_speed(w[i]) : 0.0;
      b.command[i] = b.speed[i];
    }
    return b;
  }
};

/// One explicit step of w <- w + dt/tau (clamp(cmd) - w), clamped to the
/// speed envelope. An ideal actuator (tau == 0) jumps to the clamped command.
inline RotorBank rotor_step(RotorBank bank, const RotorArray& commands, double dt) {
  if (!(dt > 0.0)) throw InputError("rotor_step: dt must be positive");
  for (std::size_t i = 0; i < 4; ++i) {
    if (std::isnan(commands[i])) throw InputError("rotor_step: NaN rotor command");
  }
  const double tau = bank.actuator.time_constant;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!bank.active[i]) {
      bank.speed[i] = 0.0;
      bank.command[i] = 0.0;
      continue;
    }
    bank.command[i] = commands[i];
    const double target = bank.clamp_speed(commands[i]);
    const double w = tau <= 0.0 ? target : bank.speed[i] + std::min(dt / tau, 1.0) * (target - bank.speed[i]);
    bank.speed[i] = bank.clamp_speed(w);
  }
  return bank;
}

}  // namespace ftq
