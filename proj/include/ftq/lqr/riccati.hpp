#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace ftq {

class RiccatiFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A'P + PA - P B R^-1 B' P + Q.
inline Eigen::MatrixXd care_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                                     const Eigen::MatrixXd& r, const Eigen::MatrixXd& p) {
  return a.transpose() * p + p * a - p * b * r.ldlt().solve(b.transpose()) * p + q;
}

/// Solves A'X + XA = -M through the Kronecker form; fine for the small
/// systems used here.
inline Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& m) {
  const Eigen::Index n = a.rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd big =
      Eigen::kroneckerProduct(eye, a.transpose()).eval() + Eigen::kroneckerProduct(a.transpose(), eye).eval();
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(m.data(), n * n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(big);
  if (!lu.isInvertible()) throw RiccatiFailure("solve_lyapunov: A has eigenvalues symmetric about the axis");
  Eigen::VectorXd x = lu.solve(rhs);
  Eigen::MatrixXd out = Eigen::Map<Eigen::MatrixXd>(x.data(), n, n);
  return 0.5 * (out + out.transpose());
}

/// Stabilizing solution from the stable invariant subspace of the
/// Hamiltonian matrix.
inline Eigen::MatrixXd care_hamiltonian(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                                        const Eigen::MatrixXd& r) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd h(2 * n, 2 * n);
  h << a, -b * r.ldlt().solve(b.transpose()), -q, -a.transpose();
  Eigen::EigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw RiccatiFailure("care: Hamiltonian eigen decomposition failed");
  Eigen::MatrixXcd basis(2 * n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    if (es.eigenvalues()(i).real() < 0.0) {
      if (k == n) throw RiccatiFailure("care: more than n stable Hamiltonian eigenvalues");
      basis.col(k++) = es.eigenvectors().col(i);
    }
  }
  if (k != n) throw RiccatiFailure("care: Hamiltonian has eigenvalues on the imaginary axis");
  const Eigen::MatrixXcd u1 = basis.topRows(n), u2 = basis.bottomRows(n);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(u1.transpose());
  if (!lu.isInvertible()) throw RiccatiFailure("care: system not stabilizable / detectable");
  const Eigen::MatrixXd p = lu.solve(u2.transpose()).transpose().real();
  return 0.5 * (p + p.transpose());
}

struct CareSolution {
  Eigen::MatrixXd P;
  Eigen::MatrixXd K;  // R^-1 B' P
  double residual = 0.0;
  int newton_steps = 0;
};

/// Hamiltonian start, then Newton-Kleinman refinement until the residual
/// max-norm drops below `tol` or stops improving.
inline CareSolution solve_care(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                               const Eigen::MatrixXd& r, double tol = 1e-10, int max_iter = 50) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || q.rows() != a.rows() || r.rows() != b.cols()) {
    throw std::invalid_argument("solve_care: dimension mismatch");
  }
  CareSolution s;
  s.P = care_hamiltonian(a, b, q, r);
  s.residual = care_residual(a, b, q, r, s.P).cwiseAbs().maxCoeff();
  for (int it = 0; it < max_iter && s.residual > tol; ++it) {
    const Eigen::MatrixXd k = r.ldlt().solve(b.transpose() * s.P);
    const Eigen::MatrixXd ak = a - b * k;
    const Eigen::MatrixXd next = solve_lyapunov(ak, q + k.transpose() * r * k);
    const double res = care_residual(a, b, q, r, next).cwiseAbs().maxCoeff();
    if (!(res < s.residual)) break;
    s.P = next;
    s.residual = res;
    s.newton_steps = it + 1;
  }
  s.K = r.ldlt().solve(b.transpose() * s.P);
  if (!s.P.allFinite()) throw RiccatiFailure("care: non-finite solution");
  return s;
}

inline bool is_hurwitz(const Eigen::MatrixXd& a) {
  const Eigen::VectorXcd ev = a.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (!(ev(i).real() < 0.0)) return false;
  }
  return true;
}

inline double spectral_radius(const Eigen::MatrixXd& a) { return a.eigenvalues().cwiseAbs().maxCoeff(); }

}  // namespace ftq
