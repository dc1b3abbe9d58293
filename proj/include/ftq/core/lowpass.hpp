#pragma once

#include <cmath>

#include "ftq/core/math.hpp"

namespace ftq {

struct LowPassConfig {
  double cutoff_hz = 15.0;
  double damping = 0.707;
};

/// Second-order low-pass y'' = wc^2 (u - y) - 2 d wc y', discretized with an
/// exact zero-order hold so that sampled step responses match the continuous
/// filter and the DC gain is exactly one.
class LowPassFilter2 {
 public:
  LowPassFilter2() : LowPassFilter2(2.0 * kPi * 15.0, 0.707, 1.0 / 500.0) {}

  LowPassFilter2(double natural_freq, double damping, double sample_period)
      : wc_(natural_freq), damping_(damping), period_(sample_period) {
    if (!(natural_freq > 0.0) || !(damping > 0.0) || !(sample_period > 0.0)) {
      throw InputError("LowPassFilter2: frequency, damping and period must be positive");
    }
    discretize();
  }

  static LowPassFilter2 from_config(const LowPassConfig& c, double sample_period) {
    return LowPassFilter2(2.0 * kPi * c.cutoff_hz, c.damping, sample_period);
  }

  double step(double sample) {
    const Vec2 next = phi_ * state_ + gamma_ * sample;
    state_ = next;
    return state_(0);
  }

  /// Sets the filter to steady state at `value`.
  void reset(double value) { state_ = Vec2(value, 0.0); }

  double value() const { return state_(0); }
  double rate() const { return state_(1); }
  double natural_frequency() const { return wc_; }
  double damping() const { return damping_; }
  double period() const { return period_; }

 private:
  void discretize() {
    const double w = wc_, z = damping_, t = period_;
    Mat2 a;
    a << 0.0, 1.0, -w * w, -2.0 * z * w;
    const double decay = std::exp(-z * w * t);
    // exp(A t) = e^{-z w t} [ c(t) I + s(t) (A + z w I) ]
    const double disc = z * z - 1.0;
    double c, s;
    if (std::abs(disc) < 1e-12) {
      c = 1.0;
      s = t;
    } else if (disc < 0.0) {
      const double wd = w * std::sqrt(-disc);
      c = std::cos(wd * t);
      s = std::sin(wd * t) / wd;
    } else {
      const double wd = w * std::sqrt(disc);
      c = std::cosh(wd * t);
      s = std::sinh(wd * t) / wd;
    }
    phi_ = decay * (c * Mat2::Identity() + s * (a + z * w * Mat2::Identity()));
    // Gamma = A^{-1} (Phi - I) B with B = [0, w^2]^T.
    const Vec2 b(0.0, w * w);
    gamma_ = a.inverse() * (phi_ - Mat2::Identity()) * b;
  }

  double wc_;
  double damping_;
  double period_;
  Mat2 phi_ = Mat2::Identity();
  Vec2 gamma_ = Vec2::Zero();
  Vec2 state_ = Vec2::Zero();
};

}  // namespace ftq
