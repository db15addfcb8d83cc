#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "vrudder/lti.hpp"

namespace vrudder {

std::vector<Complex> eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("eigenvalues: matrix must be square");
  if (!m.allFinite()) throw std::invalid_argument("eigenvalues: non-finite entries");
  if (m.rows() == 0) return {};
  Eigen::EigenSolver<Matrix> solver(m, false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue iteration did not converge");
  std::vector<Complex> out(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + solver.eigenvalues().size());
  return out;
}

double spectral_abscissa(const Matrix& m) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Complex& l : eigenvalues(m)) worst = std::max(worst, l.real());
  return worst;
}

bool is_stable(const StateSpace& sys) { return sys.states() == 0 || spectral_abscissa(sys.a()) < 0.0; }

CMatrix freq_response(const StateSpace& sys, double omega) {
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw std::invalid_argument("frequency must be finite and >= 0");
  const auto n = sys.states();
  CMatrix out = sys.d().cast<Complex>();
  if (n == 0) return out;
  CMatrix resolvent = -sys.a().cast<Complex>();
  resolvent.diagonal().array() += Complex(0.0, omega);
  Eigen::FullPivLU<CMatrix> lu(resolvent);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) {
    throw NumericalError("frequency response is singular at omega = " + std::to_string(omega));
  }
  out += sys.c().cast<Complex>() * lu.solve(sys.b().cast<Complex>());
  return out;
}

Matrix dc_gain(const StateSpace& sys) {
  if (sys.states() == 0) return sys.d();
  Eigen::FullPivLU<Matrix> lu(sys.a());
  if (!lu.isInvertible() || lu.rcond() < 1e-14) throw NumericalError("DC gain undefined: pole at the origin");
  return sys.d() - sys.c() * lu.solve(sys.b());
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw std::invalid_argument("log_grid needs 0 < lo < hi, count >= 2");
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double llo = std::log10(lo);
  const double step = (std::log10(hi) - llo) / (count - 1);
  for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = std::pow(10.0, llo + step * i);
  return grid;
}

double max_singular_value(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

std::vector<Vector> singular_values(const StateSpace& sys, std::span<const double> omega_grid) {
  if (omega_grid.empty()) throw std::invalid_argument("singular_values: empty frequency grid");
  for (std::size_t i = 0; i < omega_grid.size(); ++i) {
    if (!(omega_grid[i] > 0.0)) throw std::invalid_argument("singular_values: grid must be positive");
    if (i > 0 && !(omega_grid[i] > omega_grid[i - 1])) {
      throw std::invalid_argument("singular_values: grid must be strictly increasing");
    }
  }
  std::vector<Vector> out;
  out.reserve(omega_grid.size());
  for (double w : omega_grid) {
    Eigen::JacobiSVD<CMatrix> svd(freq_response(sys, w));
    out.emplace_back(svd.singularValues());
  }
  return out;
}

Discretization discretize_zoh(const StateSpace& sys, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("discretization step must be positive");
  const auto n = sys.states();
  const auto m = sys.inputs();
  Discretization out{Matrix::Identity(n, n), Matrix::Zero(n, m)};
  if (n == 0) return out;
  Matrix aug = Matrix::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = sys.a() * dt;
  aug.topRightCorner(n, m) = sys.b() * dt;
  const Matrix e = aug.exp();
  out.phi = e.topLeftCorner(n, n);
  out.gamma = e.topRightCorner(n, m);
  return out;
}

StepResponse step_response(const StateSpace& sys, double duration, double dt) {
  if (!(dt > 0.0) || !(duration >= dt)) throw std::invalid_argument("step_response needs dt > 0 and duration >= dt");
  const auto n = sys.states();
  const auto m = sys.inputs();
  const auto samples = static_cast<Eigen::Index>(std::floor(duration / dt + 1e-9)) + 1;
  const auto [phi, gamma] = discretize_zoh(sys, dt);

  StepResponse out;
  out.time.resize(static_cast<std::size_t>(samples));
  for (Eigen::Index k = 0; k < samples; ++k) out.time[static_cast<std::size_t>(k)] = static_cast<double>(k) * dt;
  for (Eigen::Index j = 0; j < m; ++j) {
    Matrix y(samples, sys.outputs());
    Vector x = Vector::Zero(n);
    for (Eigen::Index k = 0; k < samples; ++k) {
      y.row(k) = (sys.c() * x + sys.d().col(j)).transpose();
      x = phi * x + gamma.col(j);
    }
    out.outputs.push_back(std::move(y));
  }
  return out;
}

ModeReport modal_analysis(const StateSpace& sys) {
  ModeReport report;
  for (const Complex& pole : eigenvalues(sys.a())) {
    const double mag = std::abs(pole);
    const double imag_tol = 1e-10 * std::max(1.0, mag);
    if (pole.imag() < -imag_tol) continue;  // conjugate partner already counted
    Mode mode;
    const bool oscillatory = pole.imag() > imag_tol;
    mode.pole = oscillatory ? pole : Complex(pole.real(), 0.0);
    mode.frequency = mag;
    mode.damping = mag > 0.0 ? -pole.real() / mag : std::numeric_limits<double>::quiet_NaN();
    if (mag > 0.0) mode.period = 2.0 * std::numbers::pi / mag;
    mode.name = oscillatory ? "oscillatory" : "aperiodic";
    report.modes.push_back(mode);
  }
  std::stable_sort(report.modes.begin(), report.modes.end(),
                   [](const Mode& a, const Mode& b) { return a.frequency < b.frequency; });
  return report;
}

}  // namespace vrudder
