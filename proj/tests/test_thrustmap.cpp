#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "vrudder/thrustmap.hpp"

using namespace vrudder;

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;

double factor(double CN_dr = -0.100) { return conversion_factor(default_flight_condition(), default_geometry(), CN_dr); }
}  // namespace

TEST_CASE("conversion factor") {
  CHECK(std::abs(factor() - 4.43e5) / 4.43e5 < 0.005);
  CHECK(factor(0.0) == 0.0);
  FlightCondition fast = default_flight_condition();
  fast.rho *= 2.0;
  CHECK(conversion_factor(fast, default_geometry(), -0.1) == doctest::Approx(2.0 * factor()));
  GeometryConfig g = default_geometry();
  g.y_e = 0.0;
  CHECK_THROWS(conversion_factor(default_flight_condition(), g, -0.1));
}

TEST_CASE("rudder to thrust") {
  CHECK(std::abs(rudder_to_thrust(kDeg, factor()) - 7737.0) / 7737.0 < 0.01);
  CHECK(rudder_to_thrust(0.0, factor()) == 0.0);
  CHECK(rudder_to_thrust(-kDeg, factor()) == -rudder_to_thrust(kDeg, factor()));
}

TEST_CASE("thrust to equivalent radians") {
  CHECK(thrust_to_equivalent_radians(7737.0, 4.43e5) == doctest::Approx(0.017465).epsilon(1e-3));
  CHECK(thrust_to_equivalent_radians(0.0, 4.43e5) == 0.0);
  CHECK(thrust_to_equivalent_radians(4.43e5, 4.43e5) == 1.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    CHECK(std::abs(thrust_to_equivalent_radians(rudder_to_thrust(x, factor()), factor()) - x) <= 1e-12);
  }
}

TEST_CASE("available thrust under a rudder-equivalent step") {
  MappingParams p;
  const double dt = 0.01;
  const std::vector<double> cmd(2001, 7737.0);
  const auto out = available_thrust(cmd, p, dt);
  CHECK(out[1000] >= 0.98 * 7737.0);
  CHECK(out.back() == doctest::Approx(7737.0).epsilon(1e-4));
  for (std::size_t k = 1; k < out.size(); ++k) CHECK(std::abs(out[k] - out[k - 1]) <= p.rate_limit * dt + 1e-9);
}

TEST_CASE("available thrust edge cases") {
  MappingParams p;
  const std::vector<double> zero(500, 0.0);
  for (double v : available_thrust(zero, p, 0.01)) CHECK(v == 0.0);
  const std::vector<double> huge(6001, 1e6);
  const auto out = available_thrust(huge, p, 0.01);
  CHECK(out.back() == doctest::Approx(p.saturation).epsilon(1e-6));
  for (double v : out) CHECK(v <= p.saturation + 1e-6);
  CHECK_THROWS(available_thrust(zero, p, 0.0));
}

TEST_CASE("available thrust is monotone in a constant command") {
  MappingParams p;
  const auto small = available_thrust(std::vector<double>(1500, 5000.0), p, 0.01);
  const auto large = available_thrust(std::vector<double>(1500, 20000.0), p, 0.01);
  for (std::size_t k = 0; k < small.size(); ++k) CHECK(large[k] >= small[k]);
}

TEST_CASE("slope clamp holds for random commands") {
  MappingParams p;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-60000.0, 60000.0);
  std::vector<double> cmd(3000);
  for (std::size_t k = 0; k < cmd.size(); ++k) cmd[k] = (k / 200) % 2 ? u(rng) : cmd[k > 0 ? k - 1 : 0];
  const auto out = available_thrust(cmd, p, 0.01);
  for (std::size_t k = 1; k < out.size(); ++k) {
    CHECK(std::abs(out[k] - out[k - 1]) <= p.rate_limit * 0.01 * (1 + 1e-12));
    CHECK(std::abs(out[k]) <= p.saturation + 1e-9);
  }
}

TEST_CASE("engine split") {
  const EngineSplit z = split_engines(0.0, 3221.0, 46500.0);
  CHECK(z.T1 == 3221.0);
  CHECK(z.T2 == 3221.0);
  CHECK(z.T3 == 3221.0);
  CHECK(z.T4 == 3221.0);
  const EngineSplit s = split_engines(2000.0, 3221.0, 46500.0);
  CHECK(s.T1 == 4221.0);
  CHECK(s.T4 == 2221.0);
  CHECK(s.T2 == 3221.0);
  for (double dT : {-6000.0, -1.5, 0.25, 6442.0}) {
    const EngineSplit e = split_engines(dT, 3221.0, 46500.0);
    CHECK(e.T1 - e.T4 == doctest::Approx(dT));
    CHECK(e.T1 + e.T4 == doctest::Approx(2 * 3221.0));
  }
  CHECK_THROWS(split_engines(7000.0, 3221.0, 46500.0));
}

TEST_CASE("mapping from configuration") {
  const MappingParams m = make_mapping(default_flight_condition(), default_geometry(), -0.1, EngineParams{});
  CHECK(m.k_map == doctest::Approx(factor()));
  CHECK(m.saturation == 43729.0);
  CHECK(m.rate_limit == 12726.0);
  MappingParams bad;
  bad.k_map = -1.0;
  CHECK_THROWS(bad.validate());
}
