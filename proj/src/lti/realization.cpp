#include <algorithm>

#include "vrudder/lti.hpp"

namespace vrudder {
namespace {

// Orthonormal basis of the reachable subspace of (A, B).
Matrix reachable_basis(const Matrix& a, const Matrix& b, double tol) {
  const Eigen::Index n = a.rows();
  const double scale = std::max({1.0, a.norm(), b.norm()});
  auto orth = [&](const Matrix& m) {
    if (m.cols() == 0) return Matrix(n, 0);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()(i) > tol * scale) ++rank;
    }
    return Matrix(svd.matrixU().leftCols(rank));
  };
  Matrix v = orth(b);
  for (Eigen::Index k = 0; k < n && v.cols() < n; ++k) {
    Matrix grown(n, 2 * v.cols());
    grown << v, a * v;
    const Matrix next = orth(grown);
    if (next.cols() == v.cols()) break;
    v = next;
  }
  return v;
}

}  // namespace

StateSpace minimal_realization(const StateSpace& sys, double tol) {
  if (sys.states() == 0) return sys;
  const Matrix vc = reachable_basis(sys.a(), sys.b(), tol);
  const Matrix a1 = vc.transpose() * sys.a() * vc;
  const Matrix b1 = vc.transpose() * sys.b();
  const Matrix c1 = sys.c() * vc;
  if (a1.rows() == 0) return StateSpace::gain(sys.d(), sys.input_labels(), sys.output_labels());
  const Matrix vo = reachable_basis(a1.transpose(), c1.transpose(), tol);
  if (vo.cols() == 0) return StateSpace::gain(sys.d(), sys.input_labels(), sys.output_labels());
  return StateSpace(vo.transpose() * a1 * vo, vo.transpose() * b1, c1 * vo, sys.d(), {}, sys.input_labels(),
                    sys.output_labels());
}

}  // namespace vrudder
