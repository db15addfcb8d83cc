#include "vrudder/thrustmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vrudder {

void MappingParams::validate() const {
  if (!(k_map > 0.0)) throw std::invalid_argument("conversion factor must be positive");
  if (!(saturation > 0.0) || !(rate_limit > 0.0)) throw std::invalid_argument("thrust limits must be positive");
  engine.validate();
}

double conversion_factor(const FlightCondition& cond, const GeometryConfig& geom, double CN_dr) {
  if (geom.y_e == 0.0) throw std::invalid_argument("engine moment arm must be nonzero");
  // The sign of C_Ndr is folded in: positive dT corresponds to the yawing
  // moment of a negative rudder deflection.
  return std::abs(cond.qbar() * geom.S * geom.b * CN_dr / geom.y_e);
}

MappingParams make_mapping(const FlightCondition& cond, const GeometryConfig& geom, double CN_dr,
                           const EngineParams& engine) {
  MappingParams p;
  p.k_map = conversion_factor(cond, geom, CN_dr);
  p.saturation = engine.saturation;
  p.rate_limit = engine.rate_limit;
  p.engine = engine;
  return p;
}

double rudder_to_thrust(double rudder_rad, double k_map) { return k_map * rudder_rad; }

double thrust_to_equivalent_radians(double thrust_lbf, double k_map) {
  if (!(k_map > 0.0)) throw std::invalid_argument("conversion factor must be positive");
  return thrust_lbf / k_map;
}

std::vector<double> available_thrust(std::span<const double> commanded, const MappingParams& p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  std::vector<double> out(commanded.size(), 0.0);
  if (commanded.empty()) return out;
  EngineFilter engine(p.engine, dt, 0.0);
  const double max_step = p.rate_limit * dt;
  double delivered = 0.0;
  out[0] = delivered;
  for (std::size_t k = 0; k + 1 < commanded.size(); ++k) {
    const double clipped = std::clamp(commanded[k], -p.saturation, p.saturation);
    const double lagged = engine.step(clipped);
    delivered += std::clamp(lagged - delivered, -max_step, max_step);
    out[k + 1] = delivered;
  }
  return out;
}

EngineSplit split_engines(double dT, double trim, double T_max) {
  const EngineSplit s{trim + 0.5 * dT, trim, trim, trim - 0.5 * dT};
  if (s.T1 < 0.0 || s.T1 > T_max || s.T4 < 0.0 || s.T4 > T_max) {
    throw std::invalid_argument("differential thrust allocation outside the engine envelope");
  }
  return s;
}

}  // namespace vrudder
