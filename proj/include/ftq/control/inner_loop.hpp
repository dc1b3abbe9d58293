#pragma once

#include <string>

#include "ftq/control/indi.hpp"
#include "ftq/core/math.hpp"
#include "ftq/sim/sensors.hpp"

namespace ftq {

/// What the outer loop and the scenario hand to the inner loop.
struct InnerReference {
  Vec3 n_d = Vec3(0.0, 0.0, -1.0);
  Vec3 n_d_rate = Vec3::Zero();  // slowly varying reference: zero by default
  double z = 0.0;
  double z_rate = 0.0;
  double z_accel = 0.0;
  double yaw = 0.0;  // nominal mode only
};

class InnerLoop {
 public:
  virtual ~InnerLoop() = default;
  virtual ControlOutput update(const SensorFrame& m, const InnerReference& ref) = 0;
  virtual std::string name() const = 0;
  virtual void set_chi_abs(double /*chi_abs*/) {}
  virtual double chi_abs() const { return 0.0; }
  /// Body-fixed vector being aligned with n_d.
  virtual Vec3 n_body() const { return Vec3(0.0, 0.0, -1.0); }
};

}  // namespace ftq
