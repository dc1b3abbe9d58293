#pragma once

#include <algorithm>
#include <stdexcept>

#include "ftq/core/math.hpp"

namespace ftq {

struct OuterGains {
  double kp = 1.0;   // 1/s^2
  double ki = 0.1;   // 1/s^3
  double kd = 1.0;   // 1/s
  double integral_limit = 2.0;  // bound on |ki * integral|, m/s^2
};

struct PositionReference {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
};

struct OuterOutput {
  Vec3 a_ref = Vec3::Zero();
  Vec3 n_d = Vec3(0.0, 0.0, -1.0);
};

class DegenerateThrustDirection : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Horizontal PID with vertical feed-through of the altitude reference
/// acceleration; returns the commanded thrust direction. `integral` holds
/// the running x/y error integrals and is clamped for anti-windup.
inline OuterOutput outer_loop(const Vec3& position, const Vec3& velocity, const PositionReference& ref,
                              const OuterGains& g, Vec2& integral, double dt, double gravity = 9.81) {
  const Vec2 e(position.x() - ref.position.x(), position.y() - ref.position.y());
  const Vec2 e_dot(velocity.x() - ref.velocity.x(), velocity.y() - ref.velocity.y());
  integral += e * dt;
  if (g.ki > 0.0) {
    const double bound = g.integral_limit / g.ki;
    integral = integral.cwiseMax(-bound).cwiseMin(bound);
  }
  OuterOutput out;
  out.a_ref.x() = -g.kp * e.x() - g.kd * e_dot.x() - g.ki * integral.x();
  out.a_ref.y() = -g.kp * e.y() - g.kd * e_dot.y() - g.ki * integral.y();
  out.a_ref.z() = ref.acceleration.z();
  const Vec3 v = out.a_ref - Vec3(0.0, 0.0, gravity);
  const double n = v.norm();
  if (!(n > 0.0)) throw DegenerateThrustDirection("outer_loop: a_ref equals gravity, thrust direction undefined");
  out.n_d = v / n;
  return out;
}

class OuterLoop {
 public:
  explicit OuterLoop(OuterGains gains = {}, double gravity = 9.81) : gains_(gains), gravity_(gravity) {}

  OuterOutput update(const Vec3& position, const Vec3& velocity, const PositionReference& ref, double dt) {
    last_ = outer_loop(position, velocity, ref, gains_, integral_, dt, gravity_);
    return last_;
  }

  const OuterOutput& last() const { return last_; }
  const Vec2& integral() const { return integral_; }
  const OuterGains& gains() const { return gains_; }

 private:
  OuterGains gains_;
  double gravity_;
  Vec2 integral_ = Vec2::Zero();
  OuterOutput last_{};
};

}  // namespace ftq
