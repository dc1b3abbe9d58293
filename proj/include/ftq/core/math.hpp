#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace ftq {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
/// Rotation from body to inertial frame. Kept orthonormal by integrate_rotation.
using RotMat = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a <= -kPi ? a + 2.0 * kPi : a;
}

/// Thrown for malformed numeric inputs (NaN commands, non-positive steps).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cross-product matrix: skew(w) * a == w.cross(a).
inline Mat3 skew(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

/// Closed-form exponential of skew(phi) (Rodrigues). Small angles use the
/// Taylor expansion of the coefficients.
inline Mat3 exp_so3(const Vec3& phi) {
  const double th2 = phi.squaredNorm();
  const double th = std::sqrt(th2);
  double a, b;
  if (th < 1e-4) {
    a = 1.0 - th2 / 6.0 + th2 * th2 / 120.0;
    b = 0.5 - th2 / 24.0 + th2 * th2 / 720.0;
  } else {
    a = std::sin(th) / th;
    b = (1.0 - std::cos(th)) / th2;
  }
  const Mat3 k = skew(phi);
  return Mat3::Identity() + a * k + b * k * k;
}

/// Pulls a nearly orthonormal matrix back onto SO(3) with Newton polar
/// iterations R <- R (3I - R^T R) / 2. Converges quadratically when R is
/// already close; falls back to SVD otherwise.
inline RotMat reorthonormalize(const Mat3& m) {
  RotMat r = m;
  for (int i = 0; i < 3; ++i) {
    const Mat3 e = r.transpose() * r - Mat3::Identity();
    if (e.cwiseAbs().maxCoeff() < 1e-15) break;
    if (e.cwiseAbs().maxCoeff() > 1e-2) {
      Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
      r = svd.matrixU() * svd.matrixV().transpose();
      if (r.determinant() < 0.0) {
        Mat3 u = svd.matrixU();
        u.col(2) *= -1.0;
        r = u * svd.matrixV().transpose();
      }
      continue;
    }
    r = r * (1.5 * Mat3::Identity() - 0.5 * (r.transpose() * r));
  }
  return r;
}

/// Max-abs entry of R^T R - I.
inline double orthonormality_error(const Mat3& r) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
}

/// R * exp(skew(omega_body) * dt), reorthonormalized.
inline RotMat integrate_rotation(const RotMat& r, const Vec3& omega_body, double dt) {
  if (!(dt > 0.0)) throw InputError("integrate_rotation: dt must be positive");
  return reorthonormalize(r * exp_so3(omega_body * dt));
}

/// Real parts of the two eigenvalues of a 2x2 matrix, larger first.
/// A complex pair returns trace/2 twice.
inline std::pair<double, double> eig2_real_parts(const Mat2& a) {
  const double half_tr = 0.5 * (a(0, 0) + a(1, 1));
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const double disc = half_tr * half_tr - det;
  if (disc < 0.0) return {half_tr, half_tr};
  const double s = std::sqrt(disc);
  return {half_tr + s, half_tr - s};
}

inline bool all_finite(const Vec3& v) { return v.allFinite(); }

}  // namespace ftq
