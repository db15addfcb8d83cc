#include "vrudder/airframe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vrudder {
namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool finite(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

const Labels kStates{"phi", "p", "beta", "r"};
const Labels kInputs{"da", "dT"};

}  // namespace

void FlightCondition::validate() const {
  require(finite({altitude_ft, rho, airspeed, mach, g}), "flight condition must be finite");
  require(rho > 0.0, "air density must be positive");
  require(airspeed > 0.0, "airspeed must be positive");
  require(g > 0.0, "gravity must be positive");
}

void GeometryConfig::validate() const {
  require(finite({S, b, cbar, y_e}), "geometry must be finite");
  require(S > 0.0 && b > 0.0 && y_e > 0.0, "S, b and y_e must be positive");
}

void InertiaConfig::validate() const {
  require(finite({W, m, Ixx, Iyy, Izz, Ixz}), "inertia must be finite");
  require(W > 0.0 && m > 0.0 && Ixx > 0.0 && Iyy > 0.0 && Izz > 0.0, "mass and inertia must be positive");
  require(Ixx * Izz - Ixz * Ixz > 0.0, "Ixx Izz - Ixz^2 must be positive");
}

void DerivativeSet::validate() const {
  require(finite({CL_beta, CL_p, CL_r, CL_da, CL_dr, CN_beta, CN_p, CN_r, CN_da, CN_dr, CY_beta, CY_p, CY_r,
                  CY_da, CY_dr, CL_trim}),
          "derivatives must be finite");
  require(CL_trim >= 0.0, "trim lift coefficient must be nonnegative");
}

void TrimState::validate() const {
  const double lim = std::acos(0.0);
  require(finite({theta, gamma, beta, engine_thrust}), "trim must be finite");
  require(std::abs(theta) < lim && std::abs(gamma) < lim && std::abs(beta) < lim, "trim angles must be below pi/2");
}

FlightCondition default_flight_condition() { return FlightCondition{}; }

GeometryConfig default_geometry() { return GeometryConfig{}; }

InertiaConfig nominal_inertia() { return {6.3663e5, 19786.46, 18.2e6, 33.1e6, 49.7e6, 0.97e6}; }

InertiaConfig damaged_inertia() { return {6.2954e5, 19566.10, 17.893e6, 30.925e6, 47.352e6, 0.3736e6}; }

DerivativeSet nominal_derivatives() {
  DerivativeSet d;
  d.CL_beta = -0.160;
  d.CL_p = -0.340;
  d.CL_r = 0.130;
  d.CL_da = 0.013;
  d.CL_dr = 0.008;
  d.CN_beta = 0.160;
  d.CN_p = -0.026;
  d.CN_r = -0.28;
  d.CN_da = 0.0018;
  d.CN_dr = -0.100;
  d.CY_beta = -0.90;
  d.CY_p = 0.0;
  d.CY_r = 0.0;
  d.CY_da = 0.0;
  d.CY_dr = 0.120;
  return d;
}

DerivativeSet damage_derivatives(const DerivativeSet& nominal, const FlightCondition& cond, const GeometryConfig& geom,
                                 const InertiaConfig& inertia_damaged) {
  const double qs = cond.qbar() * geom.S;
  if (!(qs != 0.0)) throw std::invalid_argument("qbar * S must be nonzero");
  DerivativeSet out = nominal;
  out.CY_beta = 0.0;
  out.CY_r = 0.0;
  out.CN_r = 0.0;
  out.CN_beta = 0.0;
  out.CL_trim = inertia_damaged.W / qs;
  out.CL_r = out.CL_trim / 4.0;
  return out;
}

DimensionalDerivatives dimensionalize(const DerivativeSet& c, const FlightCondition& cond, const GeometryConfig& geom,
                                      const InertiaConfig& in) {
  if (in.m == 0.0 || in.Ixx == 0.0 || in.Izz == 0.0) throw std::invalid_argument("mass and inertia must be nonzero");
  const double den = in.Ixx * in.Izz - in.Ixz * in.Ixz;
  if (den == 0.0) throw std::invalid_argument("singular inertia denominator");
  const double q = cond.qbar();
  const double qs = q * geom.S;
  const double qsb = qs * geom.b;
  const double rate = geom.b / (2.0 * cond.airspeed);

  DimensionalDerivatives d;
  d.L_beta = qsb * c.CL_beta / in.Ixx;
  d.L_p = qsb * rate * c.CL_p / in.Ixx;
  d.L_r = qsb * rate * c.CL_r / in.Ixx;
  d.L_da = qsb * c.CL_da / in.Ixx;
  d.N_beta = qsb * c.CN_beta / in.Izz;
  d.N_p = qsb * rate * c.CN_p / in.Izz;
  d.N_r = qsb * rate * c.CN_r / in.Izz;
  d.N_da = qsb * c.CN_da / in.Izz;
  d.Y_beta = qs * c.CY_beta / in.m;
  d.Y_p = qs * rate * c.CY_p / in.m;
  d.Y_r = qs * rate * c.CY_r / in.m;
  d.Y_da = qs * c.CY_da / in.m;
  // moment arm y_e through the coupled roll/yaw inertia
  d.L_dT = in.Ixz * geom.y_e / den;
  d.N_dT = in.Ixx * geom.y_e / den;
  return d;
}

std::vector<EntryOverride> published_overrides() {
  const StateSpace g = golden_plant();
  std::vector<EntryOverride> out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.push_back({'A', i + 1, j + 1, g.a()(i, j)});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) out.push_back({'B', i + 1, j + 1, g.b()(i, j)});
  return out;
}

AssembledPlant assemble_plant(const DimensionalDerivatives& d, const FlightCondition& cond, const TrimState& trim,
                              const InertiaConfig& inertia, const GeometryConfig& geom, double thrust_per_rad,
                              const std::vector<EntryOverride>& overrides) {
  cond.validate();
  trim.validate();
  if (std::abs(inertia.Ixx * inertia.Izz - inertia.Ixz * inertia.Ixz) <= 1e-12 * std::abs(inertia.Ixx * inertia.Izz)) {
    throw std::invalid_argument("singular inertia denominator");
  }
  (void)geom;
  const double v = cond.airspeed;
  Matrix a = Matrix::Zero(4, 4);
  a(0, 1) = 1.0;
  a(0, 3) = trim.theta;
  a(1, 1) = d.L_p;
  a(1, 2) = d.L_beta;
  a(1, 3) = d.L_r;
  a(2, 0) = cond.g / v;
  a(2, 1) = d.Y_p / v;
  a(2, 2) = (d.Y_beta + cond.g * trim.gamma) / v;
  a(2, 3) = d.Y_r / v - 1.0;
  a(3, 1) = d.N_p;
  a(3, 2) = d.N_beta;
  a(3, 3) = d.N_r;

  Matrix b = Matrix::Zero(4, 2);
  b(1, 0) = d.L_da;
  b(1, 1) = d.L_dT * thrust_per_rad;
  b(2, 0) = d.Y_da / v;
  b(3, 0) = d.N_da;
  b(3, 1) = d.N_dT * thrust_per_rad;

  AssembledPlant out{StateSpace::gain(Matrix::Zero(0, 0)), a, b, {}};
  for (const EntryOverride& o : overrides) {
    Matrix& target = o.matrix == 'A' ? a : b;
    if ((o.matrix != 'A' && o.matrix != 'B') || o.row < 1 || o.col < 1 || o.row > target.rows() ||
        o.col > target.cols()) {
      throw std::invalid_argument("override entry out of range");
    }
    const double formula = target(o.row - 1, o.col - 1);
    target(o.row - 1, o.col - 1) = o.value;
    const double diff = std::abs(o.value - formula);
    const double scale = std::max(std::abs(o.value), 1e-12);
    out.deviations.push_back({o.matrix, o.row, o.col, formula, o.value, diff == 0.0 ? 0.0 : diff / scale});
  }
  out.plant = StateSpace(a, b, Matrix::Identity(4, 4), Matrix::Zero(4, 2), kStates, kInputs, kStates);
  return out;
}

StateSpace golden_plant() {
  Matrix a(4, 4);
  a << 0, 1, 0, 0,
       0, -0.8566, -2.7681, 0.1008,
       0.0478, 0, 0, -1,
       0, -0.0248, 0, 0;
  Matrix b(4, 2);
  b << 0, 0,
       0.2249, 0.0142,
       0, 0,
       0.0118, 0.6784;
  return StateSpace(a, b, Matrix::Identity(4, 4), Matrix::Zero(4, 2), kStates, kInputs, kStates);
}

ModeReport lateral_modes(const StateSpace& plant) {
  ModeReport rep = modal_analysis(plant);
  std::vector<Mode*> real_modes;
  for (Mode& m : rep.modes) {
    if (m.pole.imag() > 0.0) {
      m.name = "dutch_roll";
    } else {
      real_modes.push_back(&m);
    }
  }
  std::sort(real_modes.begin(), real_modes.end(),
            [](const Mode* x, const Mode* y) { return std::abs(x->pole) < std::abs(y->pole); });
  if (!real_modes.empty()) real_modes.front()->name = "spiral";
  for (std::size_t i = 1; i < real_modes.size(); ++i) real_modes[i]->name = "roll";
  return rep;
}

}  // namespace vrudder
