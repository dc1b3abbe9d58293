#include <gtest/gtest.h>

#include "ftq/analysis/stability.hpp"
#include "ftq/scenario/config.hpp"
#include "ftq/scenario/runner.hpp"
#include "ftq/sim/dynamics.hpp"
#include "ftq/sim/sensors.hpp"

using namespace ftq;

namespace {
const AeroDisturbance kCalm{};
const Vec3 kStill = Vec3::Zero();

SimState rotors_off() {
  SimState s;
  s.rotors = RotorBank::at_speed({false, false, false, false}, ActuatorConfig{}, RotorArray{});
  return s;
}
}  // namespace

TEST(Dynamics, FreeFallDerivative) {
  const VehicleParams p;
  const StateDerivative d = dynamics_deriv(rotors_off(), p, RotorArray{}, Environment{});
  EXPECT_EQ(d.velocity, Vec3(0.0, 0.0, p.gravity));
}

TEST(Dynamics, HoverBalance) {
  const VehicleParams p;
  const auto f = FailureConfig::double_opposing(1);
  const double wb = trim(p, f).omega_bar;
  SimState s;
  s.rotors = RotorBank::at_speed(f.active, ActuatorConfig{}, {wb, 0, wb, 0});
  EXPECT_NEAR(dynamics_deriv(s, p, RotorArray{}, Environment{}).velocity.z(), 0.0, 1e-9);
}

TEST(Dynamics, PureSpinOnlyDamped) {
  const VehicleParams p;
  SimState s = rotors_off();
  s.omega = Vec3(0.0, 0.0, 20.0);
  const StateDerivative d = dynamics_deriv(s, p, RotorArray{}, Environment{});
  EXPECT_EQ(d.omega.x(), 0.0);
  EXPECT_EQ(d.omega.y(), 0.0);
  EXPECT_NEAR(d.omega.z(), -p.yaw_damping * 20.0 / p.Iz, 1e-12);
}

TEST(SimStep, FreeFallOneSecond) {
  const VehicleParams p;
  SimState s = rotors_off();
  for (int k = 0; k < 2000; ++k) s = sim_step(s, p, RotorArray{}, 5e-4, kCalm, kStill, kStill);
  EXPECT_NEAR(s.velocity.z(), p.gravity, 1e-9);
  EXPECT_NEAR(s.position.z(), 0.5 * p.gravity, 1e-6);
}

TEST(SimStep, SymmetricTorqueFreeSpinKeepsRate) {
  VehicleParams p;
  p.yaw_damping = 0.0;
  p.Iy = p.Ix;
  SimState s = rotors_off();
  s.omega = Vec3(1.0, 2.0, 8.0);
  const double n0 = s.omega.norm();
  for (int k = 0; k < 2000; ++k) s = sim_step(s, p, RotorArray{}, 5e-4, kCalm, kStill, kStill);
  EXPECT_NEAR(s.omega.norm(), n0, 1e-9);
}

TEST(SimStep, RotationalEnergyConserved) {
  VehicleParams p;
  p.yaw_damping = 0.0;
  SimState s = rotors_off();
  s.omega = Vec3(3.0, -2.0, 5.0);
  auto e = [&](const Vec3& w) { return 0.5 * w.dot(p.inertia() * w); };
  const double e0 = e(s.omega);
  for (int k = 0; k < 2000; ++k) s = sim_step(s, p, RotorArray{}, 5e-4, kCalm, kStill, kStill);
  EXPECT_NEAR(e(s.omega), e0, 1e-7);
}

TEST(SimStep, FourthOrderConvergence) {
  const VehicleParams p;
  const auto f = FailureConfig::double_opposing(1);
  const TrimEquilibrium t = trim(p, f);
  SimState s0;
  s0.rotors = RotorBank::at_speed(f.active, ActuatorConfig{}, {t.omega_bar * 1.02, 0.0, t.omega_bar * 0.97, 0.0});
  s0.omega = Vec3(2.0, -1.5, t.r_bar);
  const RotorArray cmd = s0.rotors.speed;
  auto run = [&](int n) {
    SimState s = s0;
    for (int k = 0; k < n; ++k) s = sim_step(s, p, cmd, 1.0 / n, kCalm, kStill, kStill);
    return s;
  };
  const SimState ref = run(3200);
  auto err = [&](const SimState& s) {
    return std::max((s.attitude - ref.attitude).norm(), (s.omega - ref.omega).norm());
  };
  const double ratio = err(run(100)) / err(run(200));
  EXPECT_GT(ratio, 12.0);
  EXPECT_LT(ratio, 20.0);
}

TEST(SimStep, NanAborts) {
  const VehicleParams p;
  SimState s = rotors_off();
  s.velocity.x() = std::nan("");
  EXPECT_THROW(sim_step(s, p, RotorArray{}, 5e-4, kCalm, kStill, kStill), SimulationDiverged);
  EXPECT_THROW(sim_step(s, p, RotorArray{}, 0.0, kCalm, kStill, kStill), InputError);
}

TEST(Sensors, NoiseOffIsTruthAndSeeded) {
  SimState s;
  s.omega = Vec3(0.1, 0.2, 0.3);
  SensorModel clean({}, 1);
  EXPECT_EQ(clean.sample(s, Vec3(0, 0, -9.81)).gyro, s.omega);

  SensorNoise n;
  n.enabled = true;
  SensorModel a(n, 42), b(n, 42), c(n, 43);
  const Vec3 ga = a.sample(s, Vec3::Zero()).gyro;
  EXPECT_EQ(ga, b.sample(s, Vec3::Zero()).gyro);
  EXPECT_NE(ga, c.sample(s, Vec3::Zero()).gyro);
  EXPECT_NE(ga, s.omega);
}

TEST(Runner, HoverAtNinetyStaysConfined) {
  Config c;
  c.inner.chi_abs = deg2rad(90.0);
  c.scenario.kind = ScenarioKind::Hover;
  c.scenario.duration = 10.0;
  const RunResult r = run_scenario(c);
  EXPECT_FALSE(r.summary.crashed);
  for (const auto& row : r.trace) {
    if (row.t > 3.0) {
      EXPECT_LT(std::abs(row.h.x()), 0.2);
      EXPECT_LT(std::abs(row.h.y()), 0.2);
    }
  }
  EXPECT_LT(r.max_orthonormality_error, 1e-8);
}

TEST(Runner, YawRateSettlesAtTrim) {
  Config c;
  c.scenario.kind = ScenarioKind::Hover;
  c.scenario.duration = 10.0;
  const RunResult r = run_scenario(c);
  const double r_bar = trim(c.vehicle, c.failure).r_bar;
  EXPECT_NEAR(r.trace.back().rates.z(), r_bar, 0.05 * std::abs(r_bar));
}

TEST(Runner, ZeroDurationGivesInitialRow) {
  Config c;
  c.scenario.kind = ScenarioKind::Hover;
  c.scenario.duration = 0.0;
  const RunResult r = run_scenario(c);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].t, 0.0);
}
