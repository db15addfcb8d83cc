#pragma once

// Rudder-pedal to differential-thrust mapping and the thrust constraints.

#include <span>
#include <vector>

#include "vrudder/airframe.hpp"
#include "vrudder/engine.hpp"

namespace vrudder {

struct MappingParams {
  double k_map = 4.43e5;        // lbf/rad
  double saturation = 43729.0;  // lbf
  double rate_limit = 12726.0;  // lbf/s
  EngineParams engine;

  void validate() const;
};

/// |qbar S b C_Ndr| / y_e, lbf per radian of rudder.
[[nodiscard]] double conversion_factor(const FlightCondition& cond, const GeometryConfig& geom, double CN_dr);

/// Mapping with the factor derived from the configuration and limits from the engine.
[[nodiscard]] MappingParams make_mapping(const FlightCondition& cond, const GeometryConfig& geom, double CN_dr,
                                         const EngineParams& engine);

[[nodiscard]] double rudder_to_thrust(double rudder_rad, double k_map);
[[nodiscard]] double thrust_to_equivalent_radians(double thrust_lbf, double k_map);

/// Delivered differential thrust for a sampled command: saturation, engine
/// delay and lag, then a per-step slope clamp. Starts from zero.
[[nodiscard]] std::vector<double> available_thrust(std::span<const double> commanded, const MappingParams& p,
                                                   double dt);

struct EngineSplit {
  double T1, T2, T3, T4;
};

/// Symmetric allocation about trim: T1 = trim + dT/2, T4 = trim - dT/2.
[[nodiscard]] EngineSplit split_engines(double dT, double trim, double T_max);

}  // namespace vrudder
