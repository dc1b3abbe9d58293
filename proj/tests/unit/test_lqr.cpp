#include <gtest/gtest.h>

#include "ftq/lqr/baseline.hpp"
#include "ftq/lqr/riccati.hpp"
#include "ftq/scenario/config.hpp"
#include "ftq/scenario/runner.hpp"

using namespace ftq;
using Eigen::MatrixXd;

TEST(Care, ScalarSystem) {
  const MatrixXd one = MatrixXd::Identity(1, 1);
  const CareSolution s = solve_care(MatrixXd::Zero(1, 1), one, one, one);
  EXPECT_NEAR(s.P(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(s.K(0, 0), 1.0, 1e-12);
}

TEST(Care, DoubleIntegrator) {
  MatrixXd a(2, 2), b(2, 1), q = MatrixXd::Zero(2, 2);
  a << 0, 1, 0, 0;
  b << 0, 1;
  q(0, 0) = 1.0;
  const CareSolution s = solve_care(a, b, q, MatrixXd::Identity(1, 1));
  EXPECT_NEAR(s.K(0, 0), 1.0, 1e-10);
  EXPECT_NEAR(s.K(0, 1), std::sqrt(2.0), 1e-10);
  EXPECT_LT(s.residual, 1e-9);
}

TEST(Care, DimensionMismatchRejected) {
  EXPECT_THROW(solve_care(MatrixXd::Zero(2, 2), MatrixXd::Zero(3, 1), MatrixXd::Zero(2, 2), MatrixXd::Identity(1, 1)),
               std::invalid_argument);
}

TEST(Lyapunov, SolvesEquation) {
  MatrixXd a(3, 3), m(3, 3);
  a << -1, 2, 0, 0, -3, 1, 1, 0, -2;
  m << 2, 0.5, 0, 0.5, 1, 0, 0, 0, 3;
  const MatrixXd x = solve_lyapunov(a, m);
  EXPECT_LT((a.transpose() * x + x * a + m).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Linearization, KinematicRowsMatchAnalytic) {
  const VehicleParams p;
  const auto f = FailureConfig::double_opposing(1);
  const TrimEquilibrium t = trim(p, f);
  const LinearModel m = linearize_relaxed_hover(p, f, t, LqrWeights{});
  // h1' = r h2 - q h3, h2' = -r h1 + p h3 with h3 = -1.
  EXPECT_NEAR(m.A(0, 1), t.r_bar, 1e-6);
  EXPECT_NEAR(m.A(0, 3), 1.0, 1e-6);
  EXPECT_NEAR(m.A(1, 0), -t.r_bar, 1e-6);
  EXPECT_NEAR(m.A(1, 2), -1.0, 1e-6);
  EXPECT_NEAR(m.A(0, 0), 0.0, 1e-6);
  EXPECT_NEAR(m.A(1, 1), 0.0, 1e-6);
}

TEST(Linearization, InputSignsFollowAllocation) {
  const VehicleParams p;
  const auto f = FailureConfig::double_opposing(1);
  LqrWeights w;
  w.actuator_states = false;
  const LinearModel m = linearize_relaxed_hover(p, f, trim(p, f), w);
  // Rotor 1 rolls and pitches positive, rotor 3 negative (per unit thrust).
  const double arm = p.arm;
  EXPECT_NEAR(m.B(2, 0), arm * std::sin(p.arm_angle) / p.Ix, 1e-4);
  EXPECT_NEAR(m.B(3, 0), arm * std::cos(p.arm_angle) / p.Iy, 1e-4);
  EXPECT_NEAR(m.B(2, 1), -arm * std::sin(p.arm_angle) / p.Ix, 1e-4);
  EXPECT_NEAR(m.B(3, 1), -arm * std::cos(p.arm_angle) / p.Iy, 1e-4);
}

TEST(Linearization, ZeroSpinRemovesCoupling) {
  const VehicleParams p;
  const auto f = FailureConfig::double_opposing(1);
  TrimEquilibrium t = trim(p, f);
  t.r_bar = 0.0;
  const LinearModel m = linearize_relaxed_hover(p, f, t, LqrWeights{});
  EXPECT_NEAR(m.A(0, 1), 0.0, 1e-9);
  EXPECT_NEAR(m.A(1, 0), 0.0, 1e-9);
}

TEST(Lqr, DefaultWeightsGiveHurwitzLoop) {
  const VehicleParams p;
  const auto f = FailureConfig::double_opposing(1);
  for (bool act : {true, false}) {
    LqrWeights w;
    w.actuator_states = act;
    const LqrGain g = solve_lqr(linearize_relaxed_hover(p, f, trim(p, f), w), w);
    EXPECT_TRUE(is_hurwitz(g.model.A - g.model.B * g.K));
    EXPECT_LT(g.residual, 1e-9);
  }
}

TEST(Lqr, ZohIsStableAtControllerRate) {
  const VehicleParams p;
  const auto f = FailureConfig::double_opposing(1);
  const LqrWeights w;
  const LqrGain g = solve_lqr(linearize_relaxed_hover(p, f, trim(p, f), w), w);
  const DiscreteModel d = discretize_zoh(g.model.A, g.model.B, 1.0 / 500.0);
  EXPECT_LT(spectral_radius(d.Ad - d.Bd * g.K), 1.0);
}

TEST(Lqr, StepIsAffine) {
  MatrixXd k(2, 3);
  k << 1, 2, 3, -1, 0.5, 4;
  const Eigen::VectorXd trim_x = Eigen::Vector3d(0.1, 0.2, 0.3), trim_u = Eigen::Vector2d(1.0, 2.0);
  const Eigen::VectorXd x1 = Eigen::Vector3d(0.5, -1.0, 2.0), x2 = Eigen::Vector3d(-0.2, 0.3, 0.1);
  EXPECT_EQ(lqr_step(k, trim_x, trim_x, trim_u), trim_u);
  const Eigen::VectorXd lhs = lqr_step(k, x1, trim_x, trim_u) + lqr_step(k, x2, trim_x, trim_u) - trim_u;
  EXPECT_LT((lhs - lqr_step(k, x1 + x2 - trim_x, trim_x, trim_u)).norm(), 1e-12);
  Eigen::VectorXd dx = trim_x;
  dx(0) += 0.01;
  EXPECT_LT((lqr_step(k, dx, trim_x, trim_u) - (trim_u - k.col(0) * 0.01)).norm(), 1e-15);
}

TEST(Lqr, HoverStabilizes) {
  Config c;
  c.controller = ControllerKind::Lqr;
  c.scenario.kind = ScenarioKind::Hover;
  c.scenario.duration = 10.0;
  const RunResult r = run_scenario(c);
  EXPECT_FALSE(r.summary.crashed);
  for (const auto& row : r.trace) EXPECT_LT(std::hypot(row.h.x(), row.h.y()), 0.2);
}
