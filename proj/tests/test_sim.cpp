#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "vrudder/airframe.hpp"
#include "vrudder/sim.hpp"
#include "vrudder/synthesis.hpp"

using namespace vrudder;

namespace {

constexpr double kMap = 4.43e5;

const LoopShapingController& paper_controller() {
  static const LoopShapingController c = [] {
    const SynthesisResult r = design(golden_plant(), build_weights());
    return LoopShapingController{r.w1, r.ks, r.w2, prefilter_gain(r, {0, 3})};
  }();
  return c;
}

MappingParams mapping() {
  MappingParams m;
  m.k_map = kMap;
  return m;
}

double peak(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

const SimTrace& nominal() {
  static const SimTrace t = simulate_closed_loop(golden_plant(), paper_controller(), mapping(), SimConfig{});
  return t;
}

}  // namespace

TEST_CASE("settling time of simple signals") {
  std::vector<double> t, flat, rise, grow;
  for (int k = 0; k <= 2000; ++k) {
    t.push_back(0.01 * k);
    flat.push_back(3.0);
    rise.push_back(1.0 - std::exp(-t.back()));
    grow.push_back(std::exp(0.2 * t.back()));
  }
  CHECK(*settling_time(t, flat, 0.02, 1.0) == 0.0);
  CHECK(std::abs(*settling_time(t, rise, 0.02, 1.0) - std::log(50.0)) <= 0.01 + 1e-9);
  CHECK_FALSE(settling_time(t, grow, 0.02, 1.0).has_value());
  CHECK_THROWS(settling_time(std::vector<double>{}, std::vector<double>{}, 0.02, 1.0));
}

TEST_CASE("open loop with zero input is identically zero") {
  SimConfig cfg;
  cfg.pilot.aileron_deg = 0.0;
  cfg.pilot.rudder_deg = 0.0;
  const SimTrace t = simulate_open_loop(golden_plant(), cfg, kMap);
  CHECK(peak(t.phi) == 0.0);
  CHECK(peak(t.p) == 0.0);
  CHECK(peak(t.beta) == 0.0);
  CHECK(peak(t.r) == 0.0);
}

TEST_CASE("damaged aircraft diverges open loop") {
  SimConfig cfg;
  cfg.duration = 100.0;
  const SimTrace t = simulate_open_loop(golden_plant(), cfg, kMap);
  CHECK(std::abs(t.phi.back()) > 10.0 * std::abs(t.phi[2000]));
  const auto flags = divergence_flags(t);
  for (bool f : flags) CHECK(f);
  CHECK_FALSE(t.settled);
}

TEST_CASE("stable open loop settles to the DC gain") {
  const StateSpace g(-Matrix::Identity(4, 4), Matrix::Ones(4, 2), Matrix::Identity(4, 4), Matrix::Zero(4, 2));
  SimConfig cfg;
  cfg.duration = 20.0;
  const SimTrace t = simulate_open_loop(g, cfg, kMap);
  CHECK(t.phi.back() == doctest::Approx(2.0).epsilon(1e-6));  // two 1 deg inputs
  CHECK(t.settled);
  const auto flags = divergence_flags(t);
  for (bool f : flags) CHECK_FALSE(f);
}

TEST_CASE("nominal closed loop settles within 15 s and honours the limits") {
  const SimTrace& t = nominal();
  const MappingParams m = mapping();
  REQUIRE(t.settled);
  CHECK(t.settling_time <= 15.0);
  for (const auto& s : t.state_settling) CHECK(s.has_value());
  for (std::size_t k = 0; k < t.time.size(); ++k) {
    CHECK(std::abs(t.da[k]) <= 26.0 + 1e-9);
    CHECK(std::abs(t.dT[k]) <= m.saturation + 1e-9);
    if (k > 0) CHECK(std::abs(t.dT[k] - t.dT[k - 1]) <= m.rate_limit * 0.01 + 1e-9);
  }
  CHECK(t.time.size() == t.phi.size());
  CHECK(t.time.size() == t.dT_cmd.size());
}

TEST_CASE("halving dt barely moves the metrics") {
  SimConfig fine;
  fine.dt = 0.005;
  const SimTrace& a = nominal();
  const SimTrace b = simulate_closed_loop(golden_plant(), paper_controller(), mapping(), fine);
  REQUIRE(b.settled);
  for (std::size_t s = 0; s < 4; ++s) CHECK(std::abs(*a.state_settling[s] - *b.state_settling[s]) < 2 * 0.01);
  CHECK(std::abs(peak(a.da) - peak(b.da)) <= 0.005 * peak(a.da));
  CHECK(std::abs(peak(a.dT) - peak(b.dT)) <= 0.005 * peak(a.dT));
}

TEST_CASE("unconstrained loop matches the analytic closed loop") {
  SimConfig cfg;
  cfg.apply_limits = false;
  cfg.engine_lag = false;
  const SimTrace t = simulate_closed_loop(golden_plant(), paper_controller(), mapping(), cfg);
  const StepResponse ref = step_response(reference_closed_loop(golden_plant(), paper_controller()), cfg.duration, cfg.dt);
  const double deg = std::numbers::pi / 180.0;
  const std::array<const std::vector<double>*, 4> ys{&t.phi, &t.p, &t.beta, &t.r};
  for (int s = 0; s < 4; ++s) {
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < t.time.size(); ++k) {
      const double y = (ref.outputs[0](k, s) + ref.outputs[1](k, s)) * deg;
      err = std::max(err, std::abs((*ys[s])[k] * deg - y));
      scale = std::max(scale, std::abs(y));
    }
    CHECK(err <= 1e-3 * scale);
  }
}

TEST_CASE("large pilot inputs saturate and hit the rate limit") {
  SimConfig cfg;
  cfg.pilot.aileron_deg = 40.0;
  cfg.pilot.rudder_deg = 15.0;
  cfg.aileron_rate_limit_dps = 60.0;
  const SimTrace t = simulate_closed_loop(golden_plant(), paper_controller(), mapping(), cfg);
  CHECK(t.rate_limit_hits > 0);
  double da_peak = 0.0;
  for (std::size_t k = 0; k < t.time.size(); ++k) {
    da_peak = std::max(da_peak, std::abs(t.da[k]));
    CHECK(std::abs(t.da[k]) <= 26.0 + 1e-9);
    if (k > 0) {
      CHECK(std::abs(t.da[k] - t.da[k - 1]) <= 60.0 * 0.01 + 1e-9);
      CHECK(std::abs(t.dT[k] - t.dT[k - 1]) <= 12726.0 * 0.01 + 1e-9);
    }
  }
  CHECK(peak(t.da_cmd) >= da_peak);
}

TEST_CASE("zero perturbation reproduces the nominal trace") {
  const Matrix zero = Matrix::Zero(4, 2);
  const SimTrace t = simulate_closed_loop(golden_plant(), paper_controller(), mapping(), SimConfig{}, &zero);
  CHECK(t.phi == nominal().phi);
  CHECK(t.dT == nominal().dT);
  const Matrix wrong = Matrix::Zero(2, 2);
  CHECK_THROWS_AS((void)simulate_closed_loop(golden_plant(), paper_controller(), mapping(), SimConfig{}, &wrong),
                  DimensionError);
}

TEST_CASE("divergence guard") {
  SimConfig cfg;
  cfg.guard = 1e-9;
  CHECK_THROWS_AS((void)simulate_closed_loop(golden_plant(), paper_controller(), mapping(), cfg), NumericalError);
}

TEST_CASE("config validation") {
  SimConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = SimConfig{};
  cfg.aileron_limit_deg = -1.0;
  CHECK_THROWS(cfg.validate());
  cfg = SimConfig{};
  cfg.integrator = "euler";
  CHECK_THROWS(cfg.validate());
}
