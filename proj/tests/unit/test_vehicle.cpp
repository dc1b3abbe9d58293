#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ftq/analysis/stability.hpp"
#include "ftq/vehicle/aero.hpp"
#include "ftq/vehicle/forces.hpp"
#include "ftq/vehicle/params.hpp"
#include "ftq/vehicle/rotors.hpp"

using namespace ftq;

namespace {
// Zero minimum speed so that "off" really is off.
RotorBank bank(const FailureConfig& f, RotorArray w) {
  ActuatorConfig a;
  a.min_speed = 0.0;
  return RotorBank::at_speed(f.active, a, w);
}
}  // namespace

TEST(Params, DefaultsValidateAndZeta) {
  const VehicleParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_NEAR(p.zeta(), 0.7214, 5e-4);
  EXPECT_NEAR(rad2deg(p.zeta()), 41.34, 0.01);
}

TEST(Params, RejectsBadValues) {
  VehicleParams p;
  p.mass = 0.0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = VehicleParams{};
  p.arm_angle = deg2rad(95.0);
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(Failure, ModesAndSigns) {
  const auto a = FailureConfig::double_opposing(1), b = FailureConfig::double_opposing(2);
  EXPECT_EQ(a.s_l, 1);
  EXPECT_EQ(b.s_l, -1);
  EXPECT_EQ(a.active_indices(), (std::vector<int>{0, 2}));
  EXPECT_EQ(b.active_indices(), (std::vector<int>{1, 3}));
  EXPECT_EQ(FailureConfig::single_rotor(4).active_indices().size(), 3u);
  EXPECT_EQ(FailureConfig::nominal().active_indices().size(), 4u);
  EXPECT_THROW(FailureConfig::double_opposing(3), ValidationError);
  EXPECT_THROW(FailureConfig::single_rotor(0), ValidationError);
}

TEST(BodyForce, Examples) {
  const VehicleParams p;
  const auto f = FailureConfig::double_opposing(1);
  EXPECT_EQ(body_force(p, bank(f, {}), Vec3::Zero()).norm(), 0.0);
  const double wb = trim(p, f).omega_bar;
  EXPECT_NEAR(-body_force(p, bank(f, {wb, 0, wb, 0}), Vec3::Zero()).z(), p.mass * p.gravity, 1e-9);
  EXPECT_NEAR(-body_force(p, bank(f, {1000, 0, 1000, 0}), Vec3::Zero()).z(), 3.8, 1e-12);
}

TEST(BodyForce, InactiveRotorsIgnored) {
  const VehicleParams p;
  RotorBank b = bank(FailureConfig::double_opposing(1), {1000, 0, 1000, 0});
  b.speed[1] = 900.0;  // should never count
  EXPECT_NEAR(-body_force(p, b, Vec3::Zero()).z(), 3.8, 1e-12);
}

TEST(BodyMoment, NominalSymmetricCancels) {
  const VehicleParams p;
  const RotorBank b = bank(FailureConfig::nominal(), {700, 700, 700, 700});
  EXPECT_LT(body_moment(p, b, RotorArray{}, Vec3::Zero(), Vec3::Zero()).norm(), 1e-15);
}

TEST(BodyMoment, OpposingPairYawOnly) {
  const VehicleParams p;
  const auto f = FailureConfig::double_opposing(2);
  const double wb = trim(p, f).omega_bar;
  const Vec3 m = body_moment(p, bank(f, {0, wb, 0, wb}), RotorArray{}, Vec3::Zero(), Vec3::Zero());
  EXPECT_NEAR(m.x(), 0.0, 1e-15);
  EXPECT_NEAR(m.y(), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m.z()), p.thrust_coeff * p.drag_ratio * 2.0 * wb * wb, 1e-15);
  EXPECT_NEAR(m.z(), -p.thrust_coeff * p.drag_ratio * 2.0 * wb * wb, 1e-15);
}

TEST(BodyMoment, YawDamping) {
  const VehicleParams p;
  const RotorBank b = bank(FailureConfig::double_opposing(1), {});
  EXPECT_NEAR(body_moment(p, b, RotorArray{}, Vec3(0, 0, 26.4), Vec3::Zero()).z(), -0.0396, 1e-12);
}

TEST(BodyMoment, AllocationMatchesGpGq) {
  const VehicleParams p;
  const auto f = FailureConfig::double_opposing(1);
  const double w1 = 1100.0, w3 = 900.0;
  const Vec3 m = body_moment(p, bank(f, {w1, 0, w3, 0}), RotorArray{}, Vec3::Zero(), Vec3::Zero());
  EXPECT_NEAR(m.x() / p.Ix, p.Gp() * (w1 * w1 - w3 * w3), 1e-9);
  EXPECT_NEAR(m.y() / p.Iy, p.Gq() * (w1 * w1 - w3 * w3), 1e-9);
}

TEST(RotorStep, Examples) {
  RotorBank b = bank(FailureConfig::nominal(), {500, 500, 500, 500});
  EXPECT_EQ(rotor_step(b, b.speed, 5e-4).speed, b.speed);

  b.actuator.min_speed = 0.0;
  b.speed = {};
  const RotorArray cmd = {1000, 1000, 1000, 1000};
  for (int k = 0; k < 60; ++k) b = rotor_step(b, cmd, 5e-4);
  EXPECT_NEAR(b.speed[0], 1000.0 * (1.0 - std::exp(-1.0)), 0.02 * 632.0);

  for (int k = 0; k < 4000; ++k) b = rotor_step(b, {5000, 5000, 5000, 5000}, 5e-4);
  EXPECT_NEAR(b.speed[2], b.actuator.max_speed, 1e-6);
  EXPECT_LE(b.speed[2], b.actuator.max_speed);
}

TEST(RotorStep, InactiveStayZeroAndNanRejected) {
  RotorBank b = bank(FailureConfig::double_opposing(1), {800, 0, 800, 0});
  b = rotor_step(b, {900, 900, 900, 900}, 1e-3);
  EXPECT_EQ(b.speed[1], 0.0);
  EXPECT_EQ(b.speed[3], 0.0);
  EXPECT_THROW(rotor_step(b, {std::numeric_limits<double>::quiet_NaN(), 0, 0, 0}, 1e-3), InputError);
}

TEST(RotorStep, IdealActuatorJumps) {
  RotorBank b = bank(FailureConfig::nominal(), {500, 500, 500, 500});
  b.actuator.time_constant = 0.0;
  b = rotor_step(b, {800, 700, 600, 5000}, 1e-3);
  EXPECT_EQ(b.speed, (RotorArray{800, 700, 600, b.actuator.max_speed}));
}

TEST(Aero, DisabledAndZeroAirspeed) {
  AeroDisturbance d;
  auto l = aero_eval(d, RotMat::Identity(), Vec3(3, 0, 0), Vec3::Zero(), Vec3::Zero());
  EXPECT_EQ(l.force.norm() + l.moment.norm(), 0.0);
  d.enabled = true;
  l = aero_eval(d, RotMat::Identity(), Vec3(1, 2, 3), Vec3::Zero(), Vec3(1, 2, 3));
  EXPECT_EQ(l.force.norm(), 0.0);
}

TEST(Aero, DragMagnitudeRotationInvariant) {
  AeroDisturbance d;
  d.enabled = true;
  for (const Vec3& axis : {Vec3(0, 0, 1), Vec3(1, 1, 0), Vec3(0.2, -0.5, 0.9)}) {
    const RotMat r = exp_so3(axis.normalized() * 0.8);
    const auto l = aero_eval(d, r, Vec3::Zero(), Vec3::Zero(), Vec3(-5, 0, 0));
    EXPECT_NEAR(l.force.norm(), 0.5, 1e-12);
  }
}
