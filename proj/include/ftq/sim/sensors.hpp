#pragma once

#include <random>

#include "ftq/core/math.hpp"
#include "ftq/sim/dynamics.hpp"
#include "ftq/vehicle/rotors.hpp"

namespace ftq {

struct SensorNoise {
  bool enabled = false;
  double gyro = 0.01;   // rad/s
  double accel = 0.1;   // m/s^2
  double rotor = 0.0;   // rad/s
  double position = 0.0;  // m
};

/// What the controller sees. Attitude and velocity come straight from truth
/// (the estimator is out of scope); position is sample-and-hold.
struct SensorFrame {
  Vec3 gyro = Vec3::Zero();
  Vec3 accel = Vec3::Zero();  // specific force, body frame
  RotorArray rotor_speeds{};
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  RotMat attitude = RotMat::Identity();
  double t = 0.0;
};

class SensorModel {
 public:
  SensorModel(SensorNoise noise, unsigned long long seed) : noise_(noise), rng_(seed) {}

  /// Samples position into the held value.
  void sample_position(const SimState& s) {
    held_position_ = s.position;
    if (noise_.enabled && noise_.position > 0.0) {
      for (int i = 0; i < 3; ++i) held_position_(i) += noise_.position * normal_(rng_);
    }
  }

  SensorFrame sample(const SimState& s, const Vec3& specific_force) {
    SensorFrame f;
    f.t = s.t;
    f.gyro = s.omega;
    f.accel = specific_force;
    f.rotor_speeds = s.rotors.speed;
    f.position = held_position_;
    f.velocity = s.velocity;
    f.attitude = s.attitude;
    if (noise_.enabled) {
      for (int i = 0; i < 3; ++i) f.gyro(i) += noise_.gyro * normal_(rng_);
      for (int i = 0; i < 3; ++i) f.accel(i) += noise_.accel * normal_(rng_);
      if (noise_.rotor > 0.0) {
        for (std::size_t i = 0; i < 4; ++i) {
          if (s.rotors.active[i]) f.rotor_speeds[i] += noise_.rotor * normal_(rng_);
        }
      }
    }
    return f;
  }

 private:
  SensorNoise noise_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  Vec3 held_position_ = Vec3::Zero();
};

}  // namespace ftq
