#include <algorithm>
#include <cmath>
#include <vector>

#include "vrudder/lti.hpp"

namespace vrudder {
namespace {

double gain_at(const StateSpace& sys, double w) { return max_singular_value(freq_response(sys, w)); }

// Frequencies where sigma_max(G(jw)) == gamma: imaginary-axis eigenvalues of
// the associated Hamiltonian.
std::vector<double> crossings(const StateSpace& sys, double gamma) {
  const Eigen::Index n = sys.states();
  const Eigen::Index m = sys.inputs();
  const Eigen::Index p = sys.outputs();
  const Matrix& a = sys.a();
  const Matrix& b = sys.b();
  const Matrix& c = sys.c();
  const Matrix& d = sys.d();
  const Matrix r = gamma * gamma * Matrix::Identity(m, m) - d.transpose() * d;
  Eigen::LLT<Matrix> llt(r);
  const Matrix rinv = llt.solve(Matrix::Identity(m, m));
  const Matrix ae = a + b * rinv * d.transpose() * c;
  Matrix h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = ae;
  h.topRightCorner(n, n) = b * rinv * b.transpose();
  h.bottomLeftCorner(n, n) = -c.transpose() * (Matrix::Identity(p, p) + d * rinv * d.transpose()) * c;
  h.bottomRightCorner(n, n) = -ae.transpose();

  std::vector<double> out;
  for (const Complex& l : eigenvalues(h)) {
    if (l.imag() < 0.0) continue;
    if (std::abs(l.real()) <= 1e-7 * std::max(1.0, std::abs(l))) out.push_back(l.imag());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double hinf_norm(const StateSpace& sys, double rel_tol) {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("hinf_norm tolerance must be positive");
  const double d_gain = sys.d().size() ? max_singular_value(sys.d().cast<Complex>()) : 0.0;
  if (sys.states() == 0) return d_gain;
  if (!is_stable(sys)) throw NumericalError("H-infinity norm needs a stable system");

  // Initial lower bound from a coarse sweep plus the pole frequencies.
  double lower = std::max(d_gain, gain_at(sys, 0.0));
  for (double w : log_grid(1e-4, 1e4, 161)) lower = std::max(lower, gain_at(sys, w));
  for (const Complex& l : eigenvalues(sys.a())) {
    if (std::abs(l) > 0.0) lower = std::max(lower, gain_at(sys, std::abs(l)));
    if (std::abs(l.imag()) > 0.0) lower = std::max(lower, gain_at(sys, std::abs(l.imag())));
  }
  if (lower == 0.0) return 0.0;

  // Two-sided level-set iteration: raise the lower bound at the midpoints of
  // the intervals where the gain exceeds the trial level.
  for (int iter = 0; iter < 200; ++iter) {
    const double gamma = (1.0 + 2.0 * rel_tol) * lower;
    const std::vector<double> w = crossings(sys, gamma);
    if (w.empty()) return 0.5 * (lower + gamma);
    double next = lower;
    if (w.size() == 1) {
      next = std::max(next, gain_at(sys, w.front()));
    } else {
      for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        const double mid = w[i] > 0.0 ? std::sqrt(w[i] * w[i + 1]) : 0.5 * w[i + 1];
        next = std::max(next, gain_at(sys, mid));
      }
    }
    if (!(next > lower * (1.0 + 0.1 * rel_tol))) return 0.5 * (lower + gamma);
    lower = next;
  }
  throw NumericalError("H-infinity norm iteration did not converge");
}

}  // namespace vrudder
