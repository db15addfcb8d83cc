#pragma once

// Seeded Monte-Carlo campaigns under additive plant uncertainty.

#include <cstdint>
#include <string>
#include <vector>

#include "vrudder/sim.hpp"

namespace vrudder {

struct UncertaintySpec {
  double level = 0.30;
  std::string structure = "full_block_additive";
  std::uint64_t seed = 1;
  int count = 1000;
  double reference_gain = 1.0;       // sigma_max(G(j w_ref)) the level scales
  double reference_frequency = 0.0;  // rad/s, informational

  void validate() const;
};

struct ReferenceGain {
  double omega;
  double gain;
};

/// Plant gain at the nominal loop crossover: the highest grid frequency
/// where sigma_max(K G) is still at least 1.
[[nodiscard]] ReferenceGain crossover_reference_gain(const StateSpace& plant, const StateSpace& k);

/// Deterministic 64-bit seed for one run.
[[nodiscard]] std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run_index);

/// 4 x 2 constant block with sigma_max = level * reference_gain * u,
/// u uniform in (0, 1], direction Gaussian.
[[nodiscard]] Matrix sample_perturbation(const UncertaintySpec& spec, int run_index);

struct RunResult {
  int index = 0;
  bool stable = false;
  double settling_time = 0.0;  // infinity when unsettled
  double peak_da = 0.0;        // deg
  double peak_dT = 0.0;        // lbf
  double steady_dT = 0.0;      // lbf, final-window mean
  double steady_dT_low = 0.0;  // lbf, final-window range
  double steady_dT_high = 0.0;
  double delta_norm = 0.0;
  int rate_limit_hits = 0;
  std::string failure;
};

struct MetricSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct MonteCarloReport {
  std::vector<RunResult> runs;  // sorted by index
  double stable_fraction = 0.0;
  MetricSummary settling;       // stable runs
  MetricSummary peak_da;
  MetricSummary peak_dT;
  MetricSummary steady_dT;
  int rate_limit_hit_runs = 0;
  long rate_limit_hits = 0;
};

/// Runs spec.count perturbed simulations on `threads` workers (0 = hardware).
[[nodiscard]] MonteCarloReport run_campaign(const StateSpace& plant, const LoopShapingController& ctrl,
                                            const MappingParams& mapping, const UncertaintySpec& spec,
                                            const SimConfig& cfg, unsigned threads = 0);

/// Run indices ranked unstable first, then by settling time, then by peak dT.
[[nodiscard]] std::vector<int> worst_case_summary(const MonteCarloReport& report);

}  // namespace vrudder
