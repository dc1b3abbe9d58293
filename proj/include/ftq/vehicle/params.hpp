#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftq/core/math.hpp"

namespace ftq {

/// Raised when a parameter bundle violates its invariants. `field` names the
/// offending entry so config front-ends can point at it.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Physical constants of the vehicle. Defaults are the modified Bebop2.
struct VehicleParams {
  double Ix = 1.45e-3;            // kg m^2
  double Iy = 1.26e-3;            // kg m^2
  double Iz = 2.52e-3;            // kg m^2
  double Ip = 8.0e-6;             // rotor inertia about its axis, kg m^2
  double mass = 0.410;            // kg
  double arm = 0.145;             // b, m
  double arm_angle = deg2rad(52.6);  // beta, rad
  double yaw_damping = 1.5e-3;    // gamma, N m s
  double thrust_coeff = 1.9e-6;   // kappa, N s^2 / rad^2
  double drag_ratio = 0.01;       // sigma, m
  double gravity = 9.81;          // m/s^2

  void validate() const {
    auto positive = [](const char* name, double v) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(name, "must be finite and > 0");
    };
    positive("Ix", Ix);
    positive("Iy", Iy);
    positive("Iz", Iz);
    positive("Ip", Ip);
    positive("mass", mass);
    positive("arm", arm);
    positive("arm_angle", arm_angle);
    positive("yaw_damping", yaw_damping);
    positive("thrust_coeff", thrust_coeff);
    positive("drag_ratio", drag_ratio);
    positive("gravity", gravity);
    if (!(arm_angle < kPi / 2.0)) throw ValidationError("arm_angle", "must lie in (0, 90) deg");
  }

  Mat3 inertia() const { return Vec3(Ix, Iy, Iz).asDiagonal(); }

  // Angular-acceleration effectiveness per unit rotor speed squared.
  double Gp() const { return thrust_coeff * arm * std::sin(arm_angle) / Ix; }
  double Gq() const { return thrust_coeff * arm * std::cos(arm_angle) / Iy; }
  double Gr() const { return drag_ratio * thrust_coeff / Iz; }

  double Ax() const { return (Iy - Iz) / Ix; }
  double Ay() const { return (Iz - Ix) / Iy; }
  double Az() const { return (Ix - Iy) / Iz; }
  double ax() const { return Ip / Ix; }
  double ay() const { return Ip / Iy; }

  /// Output direction at which y2 loses all control effectiveness.
  double zeta() const { return std::atan((Ix / Iy) / std::tan(arm_angle)); }
};

/// Per-rotor sign patterns of the moment allocation (rotor index 0..3 maps to
/// rotors 1..4). The yaw pattern doubles as the spin direction used by the
/// gyroscopic terms.
inline constexpr std::array<double, 4> kRollSign = {+1.0, -1.0, -1.0, +1.0};
inline constexpr std::array<double, 4> kPitchSign = {+1.0, +1.0, -1.0, -1.0};
inline constexpr std::array<double, 4> kYawSign = {+1.0, -1.0, +1.0, -1.0};

enum class FailureMode { DoubleOpposing, SingleRotor, Nominal };

inline const char* to_string(FailureMode m) {
  switch (m) {
    case FailureMode::DoubleOpposing: return "double_opposing";
    case FailureMode::SingleRotor: return "single_rotor";
    case FailureMode::Nominal: return "nominal";
  }
  return "?";
}

/// Which rotors still produce thrust, plus the two discrete signs the
/// double-failure analysis is parameterized by.
struct FailureConfig {
  FailureMode mode = FailureMode::DoubleOpposing;
  std::array<bool, 4> active = {true, false, true, false};
  int s_l = 1;   // +1: rotors 1&3 remain, -1: rotors 2&4 remain
  int s_n = -1;  // handedness of the remaining pair

  /// `first_remaining` is 1 (rotors 1 and 3 left) or 2 (rotors 2 and 4 left).
  static FailureConfig double_opposing(int first_remaining = 1) {
    FailureConfig f;
    f.mode = FailureMode::DoubleOpposing;
    if (first_remaining == 1) {
      f.active = {true, false, true, false};
      f.s_l = 1;
    } else if (first_remaining == 2) {
      f.active = {false, true, false, true};
      f.s_l = -1;
    } else {
      throw ValidationError("failure.remaining", "must be [1,3] or [2,4]");
    }
    f.s_n = handedness(f.active);
    return f;
  }

  /// `failed` is the 1-based index of the lost rotor.
  static FailureConfig single_rotor(int failed = 4) {
    if (failed < 1 || failed > 4) throw ValidationError("failure.failed", "rotor index must be 1..4");
    FailureConfig f;
    f.mode = FailureMode::SingleRotor;
    f.active = {true, true, true, true};
    f.active[static_cast<std::size_t>(failed - 1)] = false;
    // The rotor diagonal to the failed one idles; the remaining opposing pair
    // carries the vehicle, so its handedness sets the spin direction.
    const int pair_first = (failed == 2 || failed == 4) ? 1 : 2;
    f.s_l = pair_first == 1 ? 1 : -1;
    f.s_n = pair_first == 1 ? -1 : 1;
    return f;
  }

  static FailureConfig nominal() {
    FailureConfig f;
    f.mode = FailureMode::Nominal;
    f.active = {true, true, true, true};
    f.s_l = 1;
    f.s_n = -1;
    return f;
  }

  /// s_n of a set of rotors sharing one spin direction: +1 clockwise.
  static int handedness(const std::array<bool, 4>& active) {
    for (std::size_t i = 0; i < 4; ++i) {
      if (active[i]) return kYawSign[i] > 0.0 ? -1 : 1;
    }
    return 1;
  }

  std::vector<int> active_indices() const {
    std::vector<int> out;
    for (int i = 0; i < 4; ++i) {
      if (active[static_cast<std::size_t>(i)]) out.push_back(i);
    }
    return out;
  }

  int active_count() const { return static_cast<int>(active_indices().size()); }

  void validate() const {
    const int n = active_count();
    if (s_l != 1 && s_l != -1) throw ValidationError("failure.s_l", "must be +1 or -1");
    if (s_n != 1 && s_n != -1) throw ValidationError("failure.s_n", "must be +1 or -1");
    switch (mode) {
      case FailureMode::DoubleOpposing: {
        const bool pair13 = active == std::array<bool, 4>{true, false, true, false};
        const bool pair24 = active == std::array<bool, 4>{false, true, false, true};
        if (!(pair13 && s_l == 1) && !(pair24 && s_l == -1)) {
          throw ValidationError("failure", "double_opposing needs rotors {1,3} with s_l=+1 or {2,4} with s_l=-1");
        }
        if (s_n != handedness(active)) throw ValidationError("failure.s_n", "inconsistent with rotor handedness");
        break;
      }
      case FailureMode::SingleRotor:
        if (n != 3) throw ValidationError("failure", "single_rotor needs exactly three active rotors");
        break;
      case FailureMode::Nominal:
        if (n != 4) throw ValidationError("failure", "nominal needs four active rotors");
        break;
    }
  }
};

}  // namespace ftq
