#pragma once

// H-infinity loop-shaping design: weights, shaped plant, normalized coprime
// factor robust stabilization, final controller, closed-loop maps, margins.

#include <limits>
#include <vector>

#include "vrudder/lti.hpp"

namespace vrudder {

struct LoopShapingWeights {
  TransferMatrix w1;  // pre-compensator, inputs x inputs
  TransferMatrix w2;  // post-compensator, outputs x outputs
};

/// W1 = diag((4s+1)/(4s+10), (50s+5)/(18s+25)),
/// W2 = diag(16/(s+16), 120/(s+120), 120/(s+120), 120/(s+120)).
[[nodiscard]] LoopShapingWeights build_weights();

/// Weights that leave a plant with the given sizes unchanged.
[[nodiscard]] LoopShapingWeights identity_weights(int inputs, int outputs);

/// Gs = W2 G W1. With `minimal` the realization is reduced (tolerance `tol`).
[[nodiscard]] StateSpace shape_plant(const StateSpace& g, const LoopShapingWeights& w, bool minimal = true,
                                     double tol = 1e-8);

/// Normalized left coprime factors G = M^-1 N.
struct CoprimeFactors {
  StateSpace m = StateSpace::gain(Matrix(0, 0));
  StateSpace n = StateSpace::gain(Matrix(0, 0));
};

struct SynthesisResult {
  StateSpace gs = StateSpace::gain(Matrix(0, 0));  // shaped plant
  StateSpace ks = StateSpace::gain(Matrix(0, 0));  // central controller, negative feedback u = -Ks y
  StateSpace w1 = StateSpace::gain(Matrix(0, 0));
  StateSpace w2 = StateSpace::gain(Matrix(0, 0));
  double gamma_min = 0.0;
  double e_max = 0.0;
  double gamma = 0.0;     // level the controller was built for
  double verification_norm = 0.0;
  Matrix x;               // control Riccati solution
  Matrix z;               // filter Riccati solution
  CoprimeFactors ncf;
};

/// Glover-McFarlane robust stabilization of Gs at gamma = backoff * gamma_min.
[[nodiscard]] SynthesisResult ncf_synthesis(const StateSpace& gs, double backoff = 1.05);

/// Shapes `g`, synthesizes Ks and records the weights in the result.
[[nodiscard]] SynthesisResult design(const StateSpace& g, const LoopShapingWeights& w, double backoff = 1.05,
                                     double tol = 1e-8);

/// Normalized left coprime factors from a filter Riccati solution.
[[nodiscard]] CoprimeFactors normalized_coprime_factors(const StateSpace& gs, const Matrix& z);

/// || [K; I] (I + G K)^-1 [I, G] ||_inf for negative feedback.
[[nodiscard]] double robust_stability_norm(const StateSpace& g, const StateSpace& k);

/// K = W1 Ks W2; throws NumericalError if K does not stabilize `plant`.
[[nodiscard]] StateSpace final_controller(const SynthesisResult& r, const StateSpace& plant);

/// Ks(0) W2(0) restricted to the given reference columns.
[[nodiscard]] Matrix prefilter_gain(const SynthesisResult& r, const std::vector<int>& channels);

/// Closed loop of negative feedback u = -K y around y = G u, from external
/// inputs [r (outputs), d (inputs)] added at plant output and plant input, to
/// [y; u]. Throws on an algebraic loop.
[[nodiscard]] StateSpace closed_loop(const StateSpace& g, const StateSpace& k);

struct ClosedLoopMaps {
  StateSpace s_in = StateSpace::gain(Matrix(0, 0));
  StateSpace s_out = StateSpace::gain(Matrix(0, 0));
  StateSpace t_in = StateSpace::gain(Matrix(0, 0));
  StateSpace t_out = StateSpace::gain(Matrix(0, 0));
};

[[nodiscard]] ClosedLoopMaps closed_loop_maps(const StateSpace& g, const StateSpace& k);

struct DiskMargin {
  double alpha = 0.0;  // infinity when the loop is perfectly matched
  double gain_low = 1.0;
  double gain_high = 1.0;
  double phase_deg = 0.0;
};

/// Balanced disk margin of a square loop under unity negative feedback.
[[nodiscard]] DiskMargin disk_margin(const StateSpace& loop);

struct MarginReport {
  std::vector<DiskMargin> inputs;    // loop broken at each plant input, KG
  std::vector<DiskMargin> outputs;   // loop broken at each plant output, GK
  DiskMargin multiloop_input;
  DiskMargin multiloop_output;
};

[[nodiscard]] MarginReport design_margins(const StateSpace& g, const StateSpace& k);

}  // namespace vrudder
