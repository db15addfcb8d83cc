#pragma once

// Airframe data, tail-loss derivative rules and the lateral/directional plant.

#include <optional>
#include <string>
#include <vector>

#include "vrudder/lti.hpp"

namespace vrudder {

struct FlightCondition {
  double altitude_ft = 20000.0;
  double rho = 0.001268;     // slug/ft^3
  double airspeed = 673.0;   // ft/s
  double mach = 0.65;
  double g = 32.174;         // ft/s^2

  [[nodiscard]] double qbar() const { return 0.5 * rho * airspeed * airspeed; }
  void validate() const;
};

struct TailGeometry {
  double S_v = 0.0;  // ft^2
  double l_v = 0.0;  // ft
  double z_v = 0.0;  // ft
  double V_v = 0.0;  // volume ratio
  double eta = 0.0;
  double eta_v = 0.0;
  double dsigma_dbeta = 0.0;
  double CLalpha_v = 0.0;  // 1/rad
};

struct GeometryConfig {
  double S = 5500.0;    // ft^2
  double b = 196.0;     // ft
  double cbar = 27.3;   // ft
  double y_e = 69.83;   // outboard engine arm, ft
  std::optional<TailGeometry> tail;

  void validate() const;
};

struct InertiaConfig {
  double W = 0.0;    // lbs
  double m = 0.0;    // slugs
  double Ixx = 0.0;  // slug ft^2
  double Iyy = 0.0;
  double Izz = 0.0;
  double Ixz = 0.0;

  void validate() const;
};

struct DerivativeSet {
  double CL_beta = 0, CL_p = 0, CL_r = 0, CL_da = 0, CL_dr = 0;
  double CN_beta = 0, CN_p = 0, CN_r = 0, CN_da = 0, CN_dr = 0;
  double CY_beta = 0, CY_p = 0, CY_r = 0, CY_da = 0, CY_dr = 0;
  double CL_trim = 0;  // trim lift coefficient

  void validate() const;
  bool operator==(const DerivativeSet&) const = default;
};

struct TrimState {
  double theta = 0.0;  // rad
  double gamma = 0.0;  // rad
  double beta = 0.0;   // rad
  double engine_thrust = 3221.0;  // lbf per engine

  void validate() const;
};

/// Dimensional derivatives. Rate terms in 1/s, angle terms in 1/s^2 (moments)
/// or ft/s^2 (side force). L_dT / N_dT are per lbf of differential thrust.
struct DimensionalDerivatives {
  double L_beta = 0, L_p = 0, L_r = 0, L_da = 0, L_dT = 0;
  double N_beta = 0, N_p = 0, N_r = 0, N_da = 0, N_dT = 0;
  double Y_beta = 0, Y_p = 0, Y_r = 0, Y_da = 0;
};

/// Published 747-100 data at Mach 0.65 / 20,000 ft.
FlightCondition default_flight_condition();
GeometryConfig default_geometry();
InertiaConfig nominal_inertia();
InertiaConfig damaged_inertia();
DerivativeSet nominal_derivatives();

/// Zeroes the tail-dependent coefficients and sets C_Lr = C_L/4 with
/// C_L = W / (qbar S) from the damaged weight.
[[nodiscard]] DerivativeSet damage_derivatives(const DerivativeSet& nominal, const FlightCondition& cond,
                                               const GeometryConfig& geom, const InertiaConfig& inertia_damaged);

[[nodiscard]] DimensionalDerivatives dimensionalize(const DerivativeSet& derivs, const FlightCondition& cond,
                                                    const GeometryConfig& geom, const InertiaConfig& inertia);

/// Pins one entry of A or B (1-based indices) to a fixed value.
struct EntryOverride {
  char matrix = 'A';
  int row = 1;
  int col = 1;
  double value = 0.0;
};

/// Every entry of the published A and B matrices.
std::vector<EntryOverride> published_overrides();

struct EntryDeviation {
  char matrix;
  int row;
  int col;
  double formula;
  double used;
  /// |used - formula| / max(|used|, 1e-12); 0 when both vanish.
  double relative;
};

struct AssembledPlant {
  StateSpace plant;
  Matrix a_formula;
  Matrix b_formula;
  std::vector<EntryDeviation> deviations;  // entries where an override changed the value
};

/// States [phi, p, beta, r], inputs [da (rad), dT (rudder-equivalent rad)],
/// C = I, D = 0. `thrust_per_rad` converts the dT column from lbf to
/// rudder-equivalent radians.
[[nodiscard]] AssembledPlant assemble_plant(const DimensionalDerivatives& dim, const FlightCondition& cond,
                                            const TrimState& trim, const InertiaConfig& inertia,
                                            const GeometryConfig& geom, double thrust_per_rad,
                                            const std::vector<EntryOverride>& overrides = {});

/// The published damaged-aircraft matrices.
[[nodiscard]] StateSpace golden_plant();

/// Modal analysis with dutch_roll / spiral / roll tags.
[[nodiscard]] ModeReport lateral_modes(const StateSpace& plant);

}  // namespace vrudder
