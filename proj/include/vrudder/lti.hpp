#pragma once

// Continuous-time LTI core: state-space values, interconnection, frequency
// analysis and the dense solvers (Riccati, Lyapunov, H-infinity norm) the
// design and analysis layers are built on.

#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vrudder {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;
using Labels = std::vector<std::string>;

/// Interface sizes of two systems do not line up.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (singular system, no stabilizing solution, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Continuous-time state-space model  x' = Ax + Bu,  y = Cx + Du.
///
/// Immutable after construction. Empty label arrays are filled with
/// generated names (x1.., u1.., y1..).
class StateSpace {
 public:
  StateSpace(Matrix a, Matrix b, Matrix c, Matrix d, Labels states = {},
             Labels inputs = {}, Labels outputs = {});

  /// Memoryless system y = Du.
  static StateSpace gain(const Matrix& d, Labels inputs = {}, Labels outputs = {});

  [[nodiscard]] const Matrix& a() const { return a_; }
  [[nodiscard]] const Matrix& b() const { return b_; }
  [[nodiscard]] const Matrix& c() const { return c_; }
  [[nodiscard]] const Matrix& d() const { return d_; }

  [[nodiscard]] Eigen::Index states() const { return a_.rows(); }
  [[nodiscard]] Eigen::Index inputs() const { return b_.cols(); }
  [[nodiscard]] Eigen::Index outputs() const { return c_.rows(); }

  [[nodiscard]] const Labels& state_labels() const { return state_labels_; }
  [[nodiscard]] const Labels& input_labels() const { return input_labels_; }
  [[nodiscard]] const Labels& output_labels() const { return output_labels_; }

  [[nodiscard]] StateSpace with_labels(Labels states, Labels inputs, Labels outputs) const;

  /// Realization in coordinates z = T^-1 x.
  [[nodiscard]] StateSpace similarity(const Matrix& t) const;

  /// Sub-system with the selected input columns / output rows.
  [[nodiscard]] StateSpace select(std::span<const int> inputs, std::span<const int> outputs) const;

 private:
  Matrix a_, b_, c_, d_;
  Labels state_labels_, input_labels_, output_labels_;
};

/// Polynomial in descending powers of s.
using Polynomial = std::vector<double>;

struct Rational {
  Polynomial num;
  Polynomial den;
};

/// Rational transfer matrix, one proper channel per (output, input) pair.
class TransferMatrix {
 public:
  TransferMatrix(int outputs, int inputs);

  static TransferMatrix diagonal(const std::vector<Rational>& channels);

  void set(int output, int input, Rational channel);
  [[nodiscard]] const Rational& at(int output, int input) const;
  [[nodiscard]] int outputs() const { return outputs_; }
  [[nodiscard]] int inputs() const { return inputs_; }

  [[nodiscard]] CMatrix evaluate(Complex s) const;

 private:
  int outputs_;
  int inputs_;
  std::vector<Rational> channels_;
};

/// Controllable canonical realization of every nonzero channel, aggregated
/// block-diagonally (each channel feeds its own states).
[[nodiscard]] StateSpace to_state_space(const TransferMatrix& tm);

[[nodiscard]] Complex polyval(const Polynomial& p, Complex s);

// --- interconnection -------------------------------------------------------

/// Cascade: output of `first` drives `second` (transfer second * first).
[[nodiscard]] StateSpace series(const StateSpace& first, const StateSpace& second);
/// Sum of two systems sharing inputs and outputs.
[[nodiscard]] StateSpace parallel(const StateSpace& sys1, const StateSpace& sys2);
/// Block-diagonal stacking: inputs and outputs concatenated.
[[nodiscard]] StateSpace append_diagonal(const StateSpace& sys1, const StateSpace& sys2);
/// Closed loop u = r + sign * forward_back(y); `sign` = -1 for negative feedback.
[[nodiscard]] StateSpace feedback(const StateSpace& forward, const StateSpace& back, int sign = -1);
/// Unity feedback around a square loop.
[[nodiscard]] StateSpace feedback(const StateSpace& loop, int sign = -1);
/// Closes unity negative feedback on the listed channels of a square system,
/// leaving the remaining channels as the external input/output.
[[nodiscard]] StateSpace close_channels(const StateSpace& loop, std::span<const int> closed);
[[nodiscard]] StateSpace scale_output(const StateSpace& sys, const Matrix& gain);
[[nodiscard]] StateSpace scale_input(const StateSpace& sys, const Matrix& gain);
[[nodiscard]] StateSpace negate(const StateSpace& sys);
[[nodiscard]] StateSpace identity_system(int size);

// --- analysis ----------------------------------------------------------------

[[nodiscard]] std::vector<Complex> eigenvalues(const Matrix& m);
[[nodiscard]] double spectral_abscissa(const Matrix& m);
[[nodiscard]] bool is_stable(const StateSpace& sys);

/// C (j omega I - A)^-1 B + D.
[[nodiscard]] CMatrix freq_response(const StateSpace& sys, double omega);
[[nodiscard]] Matrix dc_gain(const StateSpace& sys);

/// Logarithmically spaced grid, `count` points from lo to hi inclusive.
[[nodiscard]] std::vector<double> log_grid(double lo, double hi, int count);

/// Singular values (descending) of the response at each grid frequency.
[[nodiscard]] std::vector<Vector> singular_values(const StateSpace& sys,
                                                  std::span<const double> omega_grid);

[[nodiscard]] double max_singular_value(const CMatrix& m);

/// Peak gain over frequency, bisection on the Hamiltonian imaginary-axis test.
[[nodiscard]] double hinf_norm(const StateSpace& sys, double rel_tol = 1e-9);

struct StepResponse {
  std::vector<double> time;
  /// One (samples x outputs) block per input channel.
  std::vector<Matrix> outputs;
};

/// Exact zero-order-hold discretization: x[k+1] = phi x[k] + gamma u[k].
struct Discretization {
  Matrix phi;
  Matrix gamma;
};
[[nodiscard]] Discretization discretize_zoh(const StateSpace& sys, double dt);

/// Zero-initial-state unit-step responses sampled on t = 0, dt, ..., duration.
[[nodiscard]] StepResponse step_response(const StateSpace& sys, double duration, double dt);

struct Mode {
  Complex pole;          // representative (nonnegative imaginary part)
  double damping;        // NaN for a pole at the origin
  double frequency;      // natural frequency |pole|, 1/s
  std::optional<double> period;  // 2 pi / frequency, absent at the origin
  std::string name;
};

struct ModeReport {
  std::vector<Mode> modes;
};

/// One record per real pole or conjugate pair, sorted by natural frequency.
[[nodiscard]] ModeReport modal_analysis(const StateSpace& sys);

// --- solvers ---------------------------------------------------------------

/// Stabilizing solution of A'X + XA - XBR^-1B'X + Q = 0.
[[nodiscard]] Matrix solve_are(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r);

/// Solution of A'X + XA + Q = 0 (A with no eigenvalue pair summing to zero).
[[nodiscard]] Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

/// Relative ARE residual ||A'X + XA - XBR^-1B'X + Q|| / max(1, ||X||).
[[nodiscard]] double are_residual(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r,
                                  const Matrix& x);

/// Removes uncontrollable and unobservable states (staircase reduction).
[[nodiscard]] StateSpace minimal_realization(const StateSpace& sys, double tol = 1e-8);

}  // namespace vrudder
