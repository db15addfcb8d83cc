#include "vrudder/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vrudder {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::size_t sample_count(const SimConfig& cfg) {
  return static_cast<std::size_t>(std::floor(cfg.duration / cfg.dt + 1e-9)) + 1;
}

void record_states(SimTrace& tr, const Vector& y) {
  tr.phi.push_back(y(0) / kDeg);
  tr.p.push_back(y(1) / kDeg);
  tr.beta.push_back(y(2) / kDeg);
  tr.r.push_back(y(3) / kDeg);
}

void finish(SimTrace& tr, const SimConfig& cfg) {
  tr.state_settling = settling_metrics(tr, cfg.settle_band, cfg.settle_window);
  tr.settled = std::all_of(tr.state_settling.begin(), tr.state_settling.end(),
                           [](const std::optional<double>& s) { return s.has_value(); });
  tr.settling_time = 0.0;
  for (const auto& s : tr.state_settling) {
    tr.settling_time = s ? std::max(tr.settling_time, *s) : std::numeric_limits<double>::infinity();
    if (!s) break;
  }
}

// Rate clamp that tolerates an infinite limit.
double slew(double target, double previous, double limit, double elapsed) {
  if (!std::isfinite(limit)) return target;
  const double step = limit * elapsed;
  return std::clamp(target, previous - step, previous + step);
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(duration >= dt)) throw std::invalid_argument("duration must be at least dt");
  if (!(aileron_limit_deg > 0.0)) throw std::invalid_argument("aileron limit must be positive");
  if (aileron_rate_limit_dps && !(*aileron_rate_limit_dps > 0.0)) {
    throw std::invalid_argument("aileron rate limit must be positive");
  }
  if (!(settle_band > 0.0) || !(settle_window > 0.0)) throw std::invalid_argument("settling band and window must be positive");
  if (!(guard > 0.0)) throw std::invalid_argument("guard threshold must be positive");
  if (integrator == nullptr || std::string_view(integrator) != "rk4") throw std::invalid_argument("only the rk4 integrator is available");
}

std::optional<double> settling_time(std::span<const double> t, std::span<const double> y, double band,
                                    double window) {
  if (t.empty() || t.size() != y.size()) throw std::invalid_argument("settling_time needs matching nonempty arrays");
  const double t_end = t.back();
  double sum = 0.0;
  std::size_t count = 0;
  double peak = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) return std::nullopt;
    peak = std::max(peak, std::abs(y[i]));
    if (t[i] >= t_end - window - 1e-12) {
      sum += y[i];
      ++count;
    }
  }
  if (peak == 0.0) return 0.0;
  const double final_value = sum / static_cast<double>(count);
  const double tol = band * peak;
  std::size_t last = y.size();
  for (std::size_t i = y.size(); i-- > 0;) {
    if (std::abs(y[i] - final_value) > tol) {
      last = i;
      break;
    }
  }
  if (last == y.size()) return 0.0;
  if (t[last] >= t_end - window - 1e-12 || last + 1 >= t.size()) return std::nullopt;
  return t[last + 1];
}

std::array<std::optional<double>, 4> settling_metrics(const SimTrace& tr, double band, double window) {
  if (tr.time.empty()) throw std::invalid_argument("empty trace");
  return {settling_time(tr.time, tr.phi, band, window), settling_time(tr.time, tr.p, band, window),
          settling_time(tr.time, tr.beta, band, window), settling_time(tr.time, tr.r, band, window)};
}

std::array<bool, 4> divergence_flags(const SimTrace& trace, double early, double factor) {
  if (trace.time.empty() || !(early > 0.0) || !(factor > 0.0)) throw std::invalid_argument("divergence test needs a trace");
  const std::array<const std::vector<double>*, 4> ys{&trace.phi, &trace.p, &trace.beta, &trace.r};
  std::array<bool, 4> out{};
  for (std::size_t s = 0; s < 4; ++s) {
    double head = 0.0;
    double tail = 0.0;
    for (std::size_t i = 0; i < trace.time.size(); ++i) {
      const double v = std::abs((*ys[s])[i]);
      double& peak = trace.time[i] <= early + 1e-12 ? head : tail;
      peak = std::max(peak, v);
    }
    out[s] = std::isfinite(tail) && tail > factor * head;
  }
  return out;
}

SimTrace simulate_open_loop(const StateSpace& plant, const SimConfig& cfg, double k_map) {
  cfg.validate();
  if (plant.inputs() != 2 || plant.outputs() != 4) throw DimensionError("open loop expects a 4-output, 2-input plant");
  const std::size_t n = sample_count(cfg);
  const Vector step_u = Vector(Eigen::Vector2d(cfg.pilot.aileron_deg * kDeg, cfg.pilot.rudder_deg * kDeg));
  auto input = [&](double t) { return t >= cfg.pilot.start - 1e-12 ? step_u : Vector(Vector::Zero(2)); };
  auto deriv = [&](const Vector& x, double t) -> Vector { return plant.a() * x + plant.b() * input(t); };

  SimTrace tr;
  Vector x = Vector::Zero(plant.states());
  const double h = cfg.dt;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * h;
    const Vector u = input(t);
    tr.time.push_back(t);
    record_states(tr, plant.c() * x + plant.d() * u);
    tr.da_cmd.push_back(u(0) / kDeg);
    tr.da.push_back(u(0) / kDeg);
    tr.dT_cmd.push_back(u(1) * k_map);
    tr.dT.push_back(u(1) * k_map);
    if (k + 1 == n) break;
    const Vector k1 = deriv(x, t);
    const Vector k2 = deriv(x + 0.5 * h * k1, t + 0.5 * h);
    const Vector k3 = deriv(x + 0.5 * h * k2, t + 0.5 * h);
    const Vector k4 = deriv(x + h * k3, t + h);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  finish(tr, cfg);
  return tr;
}

SimTrace simulate_closed_loop(const StateSpace& plant, const LoopShapingController& ctrl, const MappingParams& mapping,
                              const SimConfig& cfg, const Matrix* delta) {
  cfg.validate();
  mapping.validate();
  if (plant.inputs() != 2 || plant.outputs() != 4) throw DimensionError("closed loop expects a 4-output, 2-input plant");
  if (ctrl.prefilter.rows() != 2 || ctrl.prefilter.cols() != 2) throw DimensionError("prefilter must be 2 x 2");
  const StateSpace fb = series(ctrl.w2, ctrl.ks);  // y -> Ks W2 y
  if (fb.inputs() != 4 || fb.outputs() != 2 || ctrl.w1.inputs() != 2 || ctrl.w1.outputs() != 2) {
    throw DimensionError("controller blocks do not match the plant");
  }
  if (fb.d().cwiseAbs().maxCoeff() > 0.0) throw std::invalid_argument("feedback path Ks W2 must be strictly proper");
  Matrix d_total = plant.d();
  if (delta) {
    if (delta->rows() != 4 || delta->cols() != 2) throw DimensionError("perturbation must be 4 x 2");
    d_total += *delta;
  }

  const std::size_t n = sample_count(cfg);
  const double h = cfg.dt;
  const double k_map = mapping.k_map;
  const double inf = std::numeric_limits<double>::infinity();
  const bool lim = cfg.apply_limits;
  const double da_max = lim ? cfg.aileron_limit_deg * kDeg : inf;
  const double da_rate = lim && cfg.aileron_rate_limit_dps ? *cfg.aileron_rate_limit_dps * kDeg : inf;
  const double t_sat = lim ? mapping.saturation : inf;
  const double t_rate = lim ? mapping.rate_limit : inf;

  // Input control module: prefiltered pilot commands through the aileron
  // limit and the differential-thrust module. Open loop, so precomputed.
  const Vector v = ctrl.prefilter * Eigen::Vector2d(cfg.pilot.aileron_deg * kDeg, cfg.pilot.rudder_deg * kDeg);
  const double pilot_da = std::clamp(v(0), -da_max, da_max);
  std::vector<double> pilot_thrust(n, 0.0);
  if (cfg.engine_lag) {
    std::vector<double> commanded(n);
    for (std::size_t k = 0; k < n; ++k) {
      commanded[k] = static_cast<double>(k) * h >= cfg.pilot.start - 1e-12 ? v(1) * k_map : 0.0;
    }
    MappingParams module = mapping;
    module.saturation = t_sat;
    module.rate_limit = t_rate;
    pilot_thrust = available_thrust(commanded, module, h);
  }
  auto pilot = [&](std::size_t k, double tau) {
    const double t = static_cast<double>(k) * h + tau;
    const bool on = t >= cfg.pilot.start - 1e-12;
    double thrust = 0.0;
    if (cfg.engine_lag) {
      const std::size_t k1 = std::min(k + 1, n - 1);
      thrust = pilot_thrust[k] + (pilot_thrust[k1] - pilot_thrust[k]) * tau / h;
    } else if (on) {
      thrust = std::clamp(v(1) * k_map, -t_sat, t_sat);
    }
    return Vector(Eigen::Vector2d(on ? pilot_da : 0.0, thrust / k_map));
  };

  const auto ng = plant.states();
  const auto nf = fb.states();
  const auto nw = ctrl.w1.states();
  struct Eval {
    Vector deriv;
    Vector cmd;  // rad, before the actuation stage
    Vector u;    // rad, delivered to the plant
    Vector y;
  };
  // Actuation stage evaluated continuously inside the step: saturation, then
  // the slope clamp measured from the last recorded delivered values.
  auto evaluate = [&](const Vector& xi, std::size_t k, double tau, double da_prev, double t_prev) {
    const auto x = xi.segment(0, ng);
    const auto xf = xi.segment(ng, nf);
    const auto xw = xi.segment(ng + nf, nw);
    const Vector w1_in = pilot(k, tau) - fb.c() * xf;
    Eval e;
    e.cmd = ctrl.w1.c() * xw + ctrl.w1.d() * w1_in;
    const double da = slew(std::clamp(e.cmd(0), -da_max, da_max), da_prev, da_rate, tau);
    const double thrust = slew(std::clamp(e.cmd(1) * k_map, -t_sat, t_sat), t_prev, t_rate, tau);
    e.u = Eigen::Vector2d(da, thrust / k_map);
    e.y = plant.c() * x + d_total * e.u;
    e.deriv.resize(xi.size());
    e.deriv.segment(0, ng) = plant.a() * x + plant.b() * e.u;
    e.deriv.segment(ng, nf) = fb.a() * xf + fb.b() * e.y;
    e.deriv.segment(ng + nf, nw) = ctrl.w1.a() * xw + ctrl.w1.b() * w1_in;
    return e;
  };

  SimTrace tr;
  Vector xi = Vector::Zero(ng + nf + nw);
  double da_prev = 0.0;
  double t_prev = 0.0;
  for (std::size_t k = 0;; ++k) {
    // Delivered values at t_k: clamp of the command, measured one step from the last record.
    const Eval now = k == 0 ? evaluate(xi, 0, 0.0, 0.0, 0.0) : evaluate(xi, k - 1, h, da_prev, t_prev);
    const double t = static_cast<double>(k) * h;
    if (k > 0) {
      const double wanted = std::clamp(now.cmd(1) * k_map, -t_sat, t_sat);
      if (std::abs(wanted - now.u(1) * k_map) > 1e-9 * std::max(1.0, std::abs(wanted))) ++tr.rate_limit_hits;
    }
    tr.time.push_back(t);
    record_states(tr, now.y);
    tr.da_cmd.push_back(now.cmd(0) / kDeg);
    tr.da.push_back(now.u(0) / kDeg);
    tr.dT_cmd.push_back(now.cmd(1) * k_map);
    tr.dT.push_back(now.u(1) * k_map);
    da_prev = now.u(0);
    t_prev = now.u(1) * k_map;
    if (k + 1 == n) break;

    const Vector k1 = now.deriv;
    const Vector k2 = evaluate(xi + 0.5 * h * k1, k, 0.5 * h, da_prev, t_prev).deriv;
    const Vector k3 = evaluate(xi + 0.5 * h * k2, k, 0.5 * h, da_prev, t_prev).deriv;
    const Vector k4 = evaluate(xi + h * k3, k, h, da_prev, t_prev).deriv;
    xi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!xi.allFinite() || xi.norm() > cfg.guard) {
      throw NumericalError("closed loop diverged at t = " + std::to_string(t + h) + " s (state norm above guard)");
    }
  }
  finish(tr, cfg);
  return tr;
}

StateSpace reference_closed_loop(const StateSpace& plant, const LoopShapingController& ctrl) {
  const StateSpace fb = series(ctrl.w2, ctrl.ks);
  const StateSpace forward = series(ctrl.w1, plant);
  return series(StateSpace::gain(ctrl.prefilter), feedback(forward, fb, -1));
}

}  // namespace vrudder
