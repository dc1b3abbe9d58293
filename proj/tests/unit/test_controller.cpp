#include <gtest/gtest.h>

#include <random>

#include "ftq/control/indi.hpp"
#include "ftq/control/indi_loops.hpp"
#include "ftq/control/outer_loop.hpp"
#include "ftq/control/reduced_attitude.hpp"
#include "ftq/scenario/config.hpp"
#include "ftq/scenario/runner.hpp"

using namespace ftq;

TEST(OuterLoop, ZeroErrorPointsUp) {
  Vec2 integ = Vec2::Zero();
  const OuterOutput o = outer_loop(Vec3::Zero(), Vec3::Zero(), {}, OuterGains{}, integ, 1.0 / 120.0);
  EXPECT_LT(o.a_ref.norm(), 1e-15);
  EXPECT_LT((o.n_d - Vec3(0, 0, -1)).norm(), 1e-15);
}

TEST(OuterLoop, ProportionalTilt) {
  OuterGains g;
  g.ki = 0.0;
  Vec2 integ = Vec2::Zero();
  const OuterOutput o = outer_loop(Vec3(1, 0, 0), Vec3::Zero(), {}, g, integ, 1.0 / 120.0);
  EXPECT_NEAR(o.a_ref.x(), -1.0, 1e-15);
  EXPECT_NEAR(o.n_d.x(), -1.0 / Vec3(-1.0, 0.0, -9.81).norm(), 1e-12);
}

TEST(OuterLoop, IntegralAndClamp) {
  OuterGains g;
  g.kp = 1e-9;
  g.kd = 1e-9;
  g.ki = 0.1;
  g.integral_limit = 100.0;
  OuterLoop loop(g);
  const double dt = 0.01;
  OuterOutput o;
  for (int k = 0; k < 100; ++k) o = loop.update(Vec3(2, 0, 0), Vec3::Zero(), {}, dt);
  EXPECT_NEAR(o.a_ref.x(), -0.1 * 2.0 * 1.0, 1e-6);

  g.integral_limit = 0.05;
  OuterLoop clamped(g);
  for (int k = 0; k < 1000; ++k) o = clamped.update(Vec3(2, 0, 0), Vec3::Zero(), {}, dt);
  EXPECT_NEAR(o.a_ref.x(), -0.05, 1e-6);
}

TEST(OuterLoop, DegenerateDirectionThrows) {
  Vec2 integ = Vec2::Zero();
  PositionReference ref;
  ref.acceleration.z() = 9.81;
  EXPECT_THROW(outer_loop(Vec3::Zero(), Vec3::Zero(), ref, OuterGains{}, integ, 0.01), DegenerateThrustDirection);
}

TEST(ReducedAttitude, Kinematics) {
  const ReducedAttitude ra = reduced_attitude(RotMat::Identity(), Vec3(0, 0, -1), Vec3::Zero());
  EXPECT_EQ(reduced_attitude_rate(ra, Vec3::Zero()).norm(), 0.0);
  EXPECT_EQ(reduced_attitude_rate(ra, Vec3(0, 0, 26.4)).norm(), 0.0);
  const RotMat r = exp_so3(Vec3(0.4, -1.2, 2.5));
  EXPECT_NEAR(reduced_attitude(r, Vec3(0.6, 0, -0.8), Vec3::Zero()).h.norm(), 1.0, 1e-12);
}

TEST(Output, Y2Examples) {
  EXPECT_EQ(output_y2(Vec3(0, 0, -1), 1.0), 0.0);
  EXPECT_EQ(output_y2(Vec3(0.3, 0.5, -0.8), 0.0), 0.3);
  EXPECT_NEAR(output_y2(Vec3(0.1, -0.2, 0.0), deg2rad(105.0)), -0.2191, 5e-5);
}

TEST(Effectiveness, DrfValues) {
  const VehicleParams p;
  const Mat2 b = control_effectiveness_drf(p, 1.0, -1.0, deg2rad(105.0));
  EXPECT_NEAR(b(0, 0), -4.634e-6, 1e-9);
  EXPECT_EQ(b(0, 0), b(0, 1));
  EXPECT_EQ(b(1, 0), -b(1, 1));
  EXPECT_THROW(control_effectiveness_drf(p, 1.0, -1.0, p.zeta()), SingularEffectiveness);
  EXPECT_THROW(control_effectiveness_drf(p, 0.0, -1.0, deg2rad(105.0)), SingularEffectiveness);
}

TEST(Effectiveness, MaximalAtZetaPlusNinety) {
  const VehicleParams p;
  const double best = std::abs(control_effectiveness_drf(p, 1.0, -1.0, p.zeta() + kPi / 2.0)(1, 0));
  for (double d = 50.0; d < 220.0; d += 5.0) {
    EXPECT_LE(std::abs(control_effectiveness_drf(p, 1.0, -1.0, deg2rad(d))(1, 0)), best + 1e-18);
  }
}

TEST(IndiLaw, FixedPointAndExplicitInverse) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    Mat2 b;
    b << 1.5 + u(rng), u(rng), u(rng), 1.5 + u(rng);
    const Vec2 y(u(rng), u(rng)), uf(1e6 * (1.0 + u(rng)), 1e6 * (1.0 + u(rng)));
    EXPECT_EQ(indi_law<2>(b, y, y, uf), uf);
  }
  Mat2 b;
  b << -1, -1, 1, -1;
  const Vec2 du = indi_law<2>(b, Vec2(-2, 0), Vec2::Zero(), Vec2::Zero());
  EXPECT_NEAR(du.x(), 1.0, 1e-15);
  EXPECT_NEAR(du.y(), 1.0, 1e-15);
  Mat2 singular;
  singular << 1, 1, 2, 2;
  EXPECT_THROW(indi_law<2>(singular, Vec2::Zero(), Vec2::Zero(), Vec2::Zero()), SingularEffectiveness);
}

TEST(PseudoInput, Examples) {
  const InnerGains g;
  EXPECT_EQ(pseudo_input_drf(Eigen::Vector4d::Zero(), 0.0, 0.0, 1.25, g), Vec2(1.25, 0.0));
  EXPECT_EQ(pseudo_input_drf(Eigen::Vector4d(0, 0, 0.1, 0), 0.0, 0.0, 0.0, g).y(), -5.0);
  const Vec2 nu = pseudo_input_drf(Eigen::Vector4d(-0.1, 0.0, 0.05, -0.1), 0.0, 0.0, 0.0, g);
  EXPECT_NEAR(nu.x(), 1.5, 1e-12);
  EXPECT_NEAR(nu.y(), 0.5, 1e-12);
}

TEST(YawReference, Example) {
  EXPECT_NEAR(NominalIndi::yaw_rate_reference(0.1, 0.0, InnerGains{}), -0.5, 1e-15);
}

TEST(AltitudeEstimate, HoverIsZero) { EXPECT_NEAR(altitude_accel_estimate(-9.81, 1.0, 9.81), 0.0, 1e-15); }

TEST(FilteredDerivative, ConstantAndSinusoid) {
  const double dt = 0.002;
  FilteredDerivative d(LowPassFilter2::from_config({}, dt));
  for (int k = 0; k < 100; ++k) EXPECT_NEAR(d.step(0.7), 0.0, 1e-12);

  // y2 = A sin(w t): filtered second derivative should be -A w^2 sin(w t - lag).
  const double a = 0.1, w = 2.0 * kPi * 1.0;
  FilteredDerivative dd(LowPassFilter2::from_config({}, dt));
  double peak = 0.0;
  for (int k = 0; k < 5000; ++k) {
    const double t = k * dt;
    const double v = dd.step(a * w * std::cos(w * t));
    if (t > 3.0) peak = std::max(peak, std::abs(v));
  }
  EXPECT_NEAR(peak, a * w * w, 0.05 * a * w * w);
}

TEST(SingleFailure, SymmetricIncrementsAtHover) {
  Config c;
  c.failure = FailureConfig::single_rotor(4);
  IndiSetup s = indi_setup(c);
  SingleFailureIndi loop(s);
  const Eigen::Matrix3d b = loop.effectiveness(1.0, -1.0);
  // Columns for rotors 1 and 3 mirror each other in roll and pitch.
  EXPECT_NEAR(b(0, 0), b(0, 2), 1e-18);
  EXPECT_NEAR(b(1, 0), -b(1, 2), 1e-18);
  EXPECT_NEAR(b(2, 0), -b(2, 2), 1e-18);
}

TEST(Loops, RejectWrongFailureMode) {
  Config c;
  c.failure = FailureConfig::nominal();
  EXPECT_THROW(DoubleFailureIndi(indi_setup(c)), ValidationError);
  EXPECT_THROW(SingleFailureIndi(indi_setup(c)), ValidationError);
  c.failure = FailureConfig::double_opposing(1);
  EXPECT_THROW(NominalIndi(indi_setup(c)), ValidationError);
}

TEST(Loops, SingleAndNominalHover) {
  Config c;
  c.scenario.kind = ScenarioKind::Hover;
  c.scenario.duration = 8.0;
  for (const auto& f : {FailureConfig::single_rotor(4), FailureConfig::nominal()}) {
    c.failure = f;
    const RunResult r = run_scenario(c);
    EXPECT_FALSE(r.summary.crashed) << to_string(f.mode);
    EXPECT_LT(r.summary.final_error, 0.05) << to_string(f.mode);
  }
}

TEST(Loops, NominalYawStepSettles) {
  Config c;
  c.failure = FailureConfig::nominal();
  c.scenario.kind = ScenarioKind::Hover;
  c.scenario.duration = 8.0;
  c.scenario.yaw = 0.5;
  double yaw = 0.0;
  RunOptions opt;
  opt.on_control = [&](const SimState& st, const ControlOutput&) { yaw = std::atan2(st.attitude(1, 0), st.attitude(0, 0)); };
  const RunResult r = run_scenario(c, opt);
  ASSERT_FALSE(r.summary.crashed);
  EXPECT_NEAR(wrap_angle(yaw - 0.5), 0.0, 0.01);
  double worst_tilt = 0.0;
  for (const auto& row : r.trace) worst_tilt = std::max(worst_tilt, std::asin(std::hypot(row.h.x(), row.h.y())));
  EXPECT_LT(rad2deg(worst_tilt), 5.0);
}
