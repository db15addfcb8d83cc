#pragma once

// Second-order, time-delayed engine thrust response.

#include <vector>

#include "vrudder/lti.hpp"

namespace vrudder {

struct EngineParams {
  double tau = 1.25;          // s, 1 / bandwidth
  double zeta = 1.0;
  double t_d = 0.4;           // s
  double T_max = 46500.0;     // lbf
  double T_trim = 3221.0;     // lbf
  double rate_limit = 12726.0;   // lbf/s
  double saturation = 43729.0;   // lbf, differential thrust limit

  void validate() const;
};

struct ThrustTrace {
  std::vector<double> time;
  std::vector<double> commanded;
  std::vector<double> delivered;
};

/// States [T, dT/dt], input T_c (delayed outside), output T.
[[nodiscard]] StateSpace engine_state_space(const EngineParams& p);

/// Second-order Pade approximation of exp(-t_d s), for frequency-domain use.
[[nodiscard]] StateSpace delay_approximation(double t_d);

/// Number of dt samples the command is held back.
[[nodiscard]] int delay_samples(double t_d, double dt);

/// Sampled engine: delay line followed by the exact zero-order-hold
/// propagation of the second-order lag. Works in deviation from `initial`.
class EngineFilter {
 public:
  EngineFilter(const EngineParams& p, double dt, double initial = 0.0);
  /// Pushes the command held over [t_k, t_k+dt) and returns the output at t_k+dt.
  double step(double command);
  [[nodiscard]] double output() const;

 private:
  Matrix phi_;
  Vector gamma_;
  Vector x_;
  std::vector<double> buffer_;
  std::size_t head_ = 0;
  double initial_;
};

/// Response to a throttle step from trim to `command` at t = 0.
[[nodiscard]] ThrustTrace thrust_step(const EngineParams& p, double command, double duration, double dt);

}  // namespace vrudder
