#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftq/core/math.hpp"
#include "ftq/vehicle/params.hpp"

namespace ftq {

/// |chi| sits on a singular output direction (|chi| = zeta + k pi).
class SingularDirection : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct TrimEquilibrium {
  double r_bar = 0.0;      // rad/s
  double omega_bar = 0.0;  // rad/s
  double vz_bar = 0.0;     // m/s
  Vec3 eta_bar = Vec3::Zero();
};

/// Relaxed hover with two opposing rotors: yaw damping balances the rotor
/// drag torque, thrust balances gravity. h3 = -1 at the equilibrium.
inline TrimEquilibrium trim(const VehicleParams& p, const FailureConfig& f, double vz_bar = 0.0) {
  if (!(p.yaw_damping > 0.0)) throw ValidationError("yaw_damping", "trim needs gamma > 0");
  if (!(p.thrust_coeff > 0.0)) throw ValidationError("thrust_coeff", "trim needs kappa > 0");
  TrimEquilibrium t;
  t.r_bar = -f.s_n * p.mass * p.gravity * p.drag_ratio / p.yaw_damping;
  t.omega_bar = std::sqrt(p.mass * p.gravity / (2.0 * p.thrust_coeff));
  t.vz_bar = vz_bar;
  const double h3 = -1.0;
  const double mu = p.mass * p.drag_ratio / (p.Iz * h3);
  t.eta_bar = Vec3(0.0, 0.0, t.r_bar + f.s_n * mu * vz_bar);
  return t;
}

struct A1Matrix {
  Mat2 a = Mat2::Zero();
  double lambda = 0.0;  // Lambda
  double delta = 0.0;   // Delta
};

inline double chi_singularity(const VehicleParams& p, double chi_abs) { return std::sin(chi_abs - p.zeta()); }

/// Lambda and Delta for a given spin rate r (r = r_bar gives the A1 entries).
inline void a1_coefficients(const VehicleParams& p, const FailureConfig& f, double chi_abs, double r,
                            double omega_bar, double& lambda, double& delta) {
  const double zeta = p.zeta();
  const double alpha = p.Ax() * r - 2.0 * p.ax() * omega_bar * f.s_n;
  const double beta_y = p.Ay() * r + 2.0 * p.ay() * omega_bar * f.s_n;
  const double cz = std::cos(zeta), sz = std::sin(zeta);
  lambda = beta_y * cz * cz - alpha * sz * sz;
  delta = -alpha * sz * std::sin(chi_abs) + beta_y * cz * std::cos(chi_abs);
}

/// Linearized (eta1, eta2) zero dynamics at the relaxed hover.
inline A1Matrix a1(const VehicleParams& p, const FailureConfig& f, double chi_abs, const TrimEquilibrium& t) {
  const double s = chi_singularity(p, chi_abs);
  if (std::abs(s) < 1e-12) throw SingularDirection("a1: |chi| - zeta is a multiple of pi");
  A1Matrix m;
  a1_coefficients(p, f, chi_abs, t.r_bar, t.omega_bar, m.lambda, m.delta);
  const double k = f.s_l / s;
  m.a << -t.r_bar * std::cos(chi_abs - p.zeta()), 1.0, -t.r_bar * m.lambda, m.delta;
  m.a *= k;
  return m;
}

/// |B2| / min(|Gp|, |Gq|) with |h3| = 1.
inline double r_B(const VehicleParams& p, double chi_abs, double h3 = -1.0) {
  const double zeta = p.zeta();
  const double b2 = std::abs(h3) * p.Gp() / std::cos(zeta) * std::abs(std::sin(zeta - chi_abs));
  return b2 / std::min(std::abs(p.Gp()), std::abs(p.Gq()));
}

enum class Verdict { Admissible, Unstable, LowEffectiveness, Singular };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Admissible: return "admissible";
    case Verdict::Unstable: return "unstable";
    case Verdict::LowEffectiveness: return "low-effectiveness";
    case Verdict::Singular: return "singular";
  }
  return "?";
}

/// Singular beats unstable beats low effectiveness.
inline Verdict verdict_of(double re1, double re2, double rb, bool singular) {
  if (singular) return Verdict::Singular;
  if (std::max(re1, re2) >= 0.0) return Verdict::Unstable;
  if (rb < 1.0) return Verdict::LowEffectiveness;
  return Verdict::Admissible;
}

struct ChiPoint {
  double chi_abs = 0.0;  // rad
  double re1 = 0.0;
  double re2 = 0.0;
  double rb = 0.0;
  Verdict verdict = Verdict::Singular;
};

inline ChiPoint classify(const VehicleParams& p, const FailureConfig& f, double chi_abs, const TrimEquilibrium& t) {
  ChiPoint pt;
  pt.chi_abs = chi_abs;
  pt.rb = r_B(p, chi_abs);
  try {
    const auto [e1, e2] = eig2_real_parts(a1(p, f, chi_abs, t).a);
    pt.re1 = e1;
    pt.re2 = e2;
    pt.verdict = verdict_of(e1, e2, pt.rb, false);
  } catch (const SingularDirection&) {
    pt.re1 = pt.re2 = std::nan("");
    pt.verdict = Verdict::Singular;
  }
  return pt;
}

struct ChiInterval {
  double lo = 0.0;  // rad, inclusive grid endpoints
  double hi = 0.0;
};

struct ChiSweepResult {
  std::vector<ChiPoint> points;
  std::vector<ChiInterval> admissible;

  bool admits(double chi_abs) const {
    for (const auto& iv : admissible) {
      if (chi_abs >= iv.lo - 1e-12 && chi_abs <= iv.hi + 1e-12) return true;
    }
    return false;
  }
};

/// 0.5 deg spacing strictly inside (zeta, zeta + pi).
inline std::vector<double> default_chi_grid(const VehicleParams& p, double step_deg = 0.5) {
  std::vector<double> g;
  const double z = rad2deg(p.zeta());
  const int n = static_cast<int>(std::floor(180.0 / step_deg + 1e-9));
  for (int i = 1; i < n; ++i) g.push_back(deg2rad(z + i * step_deg));
  return g;
}

inline ChiSweepResult chi_sweep(const VehicleParams& p, const FailureConfig& f, const std::vector<double>& grid) {
  const double zeta = p.zeta();
  for (double c : grid) {
    if (!(c > zeta && c < zeta + kPi)) throw InputError("chi_sweep: grid point outside (zeta, zeta + pi)");
  }
  const TrimEquilibrium t = trim(p, f);
  ChiSweepResult res;
  res.points.reserve(grid.size());
  bool open = false;
  for (double c : grid) {
    res.points.push_back(classify(p, f, c, t));
    const bool ok = res.points.back().verdict == Verdict::Admissible;
    if (ok && !open) res.admissible.push_back({c, c});
    if (ok) res.admissible.back().hi = c;
    open = ok;
  }
  return res;
}

}  // namespace ftq
