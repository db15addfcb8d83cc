#pragma once

// Fixed-step simulation of the open and constrained closed loops.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "vrudder/lti.hpp"
#include "vrudder/thrustmap.hpp"

namespace vrudder {

struct PilotInput {
  double aileron_deg = 1.0;
  double rudder_deg = 1.0;
  double start = 0.0;  // s
};

struct SimConfig {
  double dt = 0.01;
  double duration = 40.0;
  PilotInput pilot;
  double aileron_limit_deg = 26.0;
  std::optional<double> aileron_rate_limit_dps;
  bool apply_limits = true;   // saturation and rate limits
  bool engine_lag = true;     // engine delay and lag in the pilot thrust path
  double settle_band = 0.02;
  double settle_window = 1.0;  // s, final-value averaging window
  double guard = 1e6;          // state-norm divergence threshold
  const char* integrator = "rk4";

  void validate() const;
};

struct SimTrace {
  std::vector<double> time;
  std::vector<double> phi, p, beta, r;  // deg, deg/s
  std::vector<double> da_cmd, da;       // deg
  std::vector<double> dT_cmd, dT;       // lbf
  std::array<std::optional<double>, 4> state_settling;
  bool settled = false;
  double settling_time = 0.0;  // max over states when settled
  int rate_limit_hits = 0;     // steps where the thrust slope clamp was active
};

/// The loop-shaping controller in implementation form: y -> W2 -> Ks, the
/// pilot path joins ahead of W1. Ks is the negative-feedback controller.
struct LoopShapingController {
  StateSpace w1 = StateSpace::gain(Matrix(0, 0));
  StateSpace ks = StateSpace::gain(Matrix(0, 0));
  StateSpace w2 = StateSpace::gain(Matrix(0, 0));
  Matrix prefilter;  // inputs x 2, maps [aileron, rudder] pilot commands
};

/// Settling time of one signal: the time after the last sample outside
/// band * max|y| around the mean of the final window; nullopt if unsettled.
[[nodiscard]] std::optional<double> settling_time(std::span<const double> t, std::span<const double> y, double band,
                                                  double window);

[[nodiscard]] std::array<std::optional<double>, 4> settling_metrics(const SimTrace& trace, double band,
                                                                    double window = 1.0);

/// Per state: the peak |y| after `early` seconds exceeds `factor` times the
/// peak over the first `early` seconds.
[[nodiscard]] std::array<bool, 4> divergence_flags(const SimTrace& trace, double early = 1.0, double factor = 10.0);

/// Unconstrained plant under pilot steps on both inputs (deg, rudder-equivalent).
[[nodiscard]] SimTrace simulate_open_loop(const StateSpace& plant, const SimConfig& cfg, double k_map);

/// Constrained closed loop; `delta` is an optional additive output-side
/// perturbation of the plant feedthrough. Throws NumericalError on divergence.
[[nodiscard]] SimTrace simulate_closed_loop(const StateSpace& plant, const LoopShapingController& ctrl,
                                            const MappingParams& mapping, const SimConfig& cfg,
                                            const Matrix* delta = nullptr);

/// Pure LTI closed loop from the two pilot commands (rad) to the plant
/// outputs, without limits or engine dynamics.
[[nodiscard]] StateSpace reference_closed_loop(const StateSpace& plant, const LoopShapingController& ctrl);

}  // namespace vrudder
