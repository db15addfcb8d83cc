#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "vrudder/lti.hpp"

namespace vrudder {
namespace {

void check_square(const Matrix& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) throw DimensionError(std::string(what) + " has the wrong size");
}

// Swaps the adjacent diagonal entries k, k+1 of an upper-triangular T,
// keeping U T U^H invariant.
void swap_adjacent(CMatrix& t, CMatrix& u, Eigen::Index k) {
  const Complex t11 = t(k, k);
  const Complex t22 = t(k + 1, k + 1);
  const Complex t12 = t(k, k + 1);
  Complex v1 = t12;
  Complex v2 = t22 - t11;
  const double norm = std::hypot(std::abs(v1), std::abs(v2));
  if (norm == 0.0) return;
  v1 /= norm;
  v2 /= norm;
  Eigen::Matrix2cd q;
  q << v1, -std::conj(v2), v2, std::conj(v1);
  const Eigen::Index n = t.rows();
  t.block(k, k, 2, n - k) = q.adjoint() * t.block(k, k, 2, n - k);
  t.block(0, k, k + 2, 2) = t.block(0, k, k + 2, 2) * q;
  u.middleCols(k, 2) = u.middleCols(k, 2) * q;
  t(k + 1, k) = Complex(0.0, 0.0);
}

// Reorders a complex Schur form so that eigenvalues with negative real part
// come first. Returns how many there are.
Eigen::Index order_stable_first(CMatrix& t, CMatrix& u) {
  const Eigen::Index n = t.rows();
  Eigen::Index placed = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (t(i, i).real() < 0.0) {
      for (Eigen::Index k = i; k > placed; --k) swap_adjacent(t, u, k - 1);
      ++placed;
    }
  }
  return placed;
}

Matrix symmetrize(const Matrix& x) { return 0.5 * (x + x.transpose()); }

Matrix are_lhs(const Matrix& a, const Matrix& g, const Matrix& q, const Matrix& x) {
  return a.transpose() * x + x * a - x * g * x + q;
}

}  // namespace

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
  const Eigen::Index n = a.rows();
  check_square(a, n, "A");
  check_square(q, n, "Q");
  if (n == 0) return Matrix(0, 0);
  Eigen::ComplexSchur<CMatrix> schur(a.cast<Complex>());
  if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition did not converge");
  const CMatrix& t = schur.matrixT();
  const CMatrix& u = schur.matrixU();
  const CMatrix f = u.adjoint() * q.cast<Complex>() * u;

  // T^H Y + Y T = -F, solved entry by entry.
  CMatrix y = CMatrix::Zero(n, n);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex rhs = -f(i, j);
      for (Eigen::Index k = 0; k < i; ++k) rhs -= std::conj(t(k, i)) * y(k, j);
      for (Eigen::Index k = 0; k < j; ++k) rhs -= y(i, k) * t(k, j);
      const Complex pivot = std::conj(t(i, i)) + t(j, j);
      if (std::abs(pivot) < 1e-13 * scale) throw NumericalError("Lyapunov equation is singular");
      y(i, j) = rhs / pivot;
    }
  }
  return (u * y * u.adjoint()).real();
}

double are_residual(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r, const Matrix& x) {
  const Matrix g = b * r.llt().solve(b.transpose());
  const double res = are_lhs(a, g, q, x).norm();
  return res / std::max(1.0, x.norm());
}

Matrix solve_are(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  check_square(a, n, "A");
  check_square(q, n, "Q");
  check_square(r, m, "R");
  if (b.rows() != n) throw DimensionError("B must have as many rows as A");
  if (!a.allFinite() || !b.allFinite() || !q.allFinite() || !r.allFinite()) {
    throw std::invalid_argument("Riccati data must be finite");
  }
  if ((q - q.transpose()).norm() > 1e-10 * std::max(1.0, q.norm())) throw std::invalid_argument("Q must be symmetric");
  if ((r - r.transpose()).norm() > 1e-10 * std::max(1.0, r.norm())) throw std::invalid_argument("R must be symmetric");
  Eigen::LLT<Matrix> rllt(symmetrize(r));
  if (rllt.info() != Eigen::Success) throw std::invalid_argument("R must be positive definite");
  if (n == 0) return Matrix(0, 0);

  const Matrix g = symmetrize(b * rllt.solve(b.transpose()));
  Matrix h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = a;
  h.topRightCorner(n, n) = -g;
  h.bottomLeftCorner(n, n) = -q;
  h.bottomRightCorner(n, n) = -a.transpose();

  Eigen::ComplexSchur<CMatrix> schur(h.cast<Complex>());
  if (schur.info() != Eigen::Success) throw NumericalError("Hamiltonian Schur decomposition did not converge");
  CMatrix t = schur.matrixT();
  CMatrix u = schur.matrixU();

  const double hscale = std::max(1.0, h.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    if (std::abs(t(i, i).real()) < 1e-10 * hscale) {
      throw NumericalError("no stabilizing Riccati solution: Hamiltonian has imaginary-axis eigenvalues");
    }
  }
  if (order_stable_first(t, u) != n) throw NumericalError("no stabilizing Riccati solution: wrong stable count");

  const CMatrix u1 = u.topLeftCorner(n, n);
  const CMatrix u2 = u.bottomLeftCorner(n, n);
  Eigen::FullPivLU<CMatrix> lu(u1);
  if (!lu.isInvertible() || lu.rcond() < 1e-12) {
    throw NumericalError("no stabilizing Riccati solution: stable subspace is not a graph");
  }
  // X U1 = U2  =>  U1^T X^T = U2^T.
  Eigen::FullPivLU<CMatrix> lut(u1.transpose());
  const CMatrix xc = lut.solve(u2.transpose()).transpose();
  Matrix x = symmetrize(xc.real());

  // Newton-Kleinman polishing while it improves the residual.
  double res = are_lhs(a, g, q, x).norm();
  for (int iter = 0; iter < 4 && res > 1e-14 * std::max(1.0, x.norm()); ++iter) {
    const Matrix k = g * x;
    const Matrix ac = a - k;
    if (spectral_abscissa(ac) >= 0.0) break;
    Matrix next;
    try {
      next = symmetrize(solve_lyapunov(ac, q + x * g * x));
    } catch (const NumericalError&) {
      break;
    }
    const double next_res = are_lhs(a, g, q, next).norm();
    if (!(next_res < res)) break;
    x = next;
    res = next_res;
  }
  if (spectral_abscissa(a - g * x) >= 0.0) throw NumericalError("Riccati solution is not stabilizing");
  return x;
}

}  // namespace vrudder
