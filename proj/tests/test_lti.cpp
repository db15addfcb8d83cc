#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "vrudder/lti.hpp"

using namespace vrudder;

namespace {

StateSpace first_order(double pole, double gain = 1.0) {
  return StateSpace(Matrix::Constant(1, 1, -pole), Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, gain),
                    Matrix::Zero(1, 1));
}

Matrix golden_a() {
  Matrix a(4, 4);
  a << 0, 1, 0, 0, 0, -0.8566, -2.7681, 0.1008, 0.0478, 0, 0, -1, 0, -0.0248, 0, 0;
  return a;
}

std::vector<Complex> sorted(std::vector<Complex> v) {
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

StateSpace random_stable(std::mt19937_64& rng, int n, int m, int p) {
  std::normal_distribution<double> nd;
  Matrix a(n, n), b(n, m), c(p, n), d(p, m);
  for (auto* mat : {&a, &b, &c, &d})
    for (Eigen::Index i = 0; i < mat->size(); ++i) mat->data()[i] = nd(rng);
  const double shift = spectral_abscissa(a);
  a.diagonal().array() -= shift + 0.5;
  return StateSpace(a, b, c, d);
}

}  // namespace

TEST_CASE("eigenvalues of small matrices") {
  auto e = eigenvalues(Matrix::Identity(2, 2));
  CHECK(e.size() == 2);
  for (auto l : e) CHECK(std::abs(l - Complex(1, 0)) < 1e-12);

  Matrix comp(2, 2);
  comp << 0, 1, -2, -3;
  auto r = sorted(eigenvalues(comp));
  CHECK(std::abs(r[0] - Complex(-2, 0)) < 1e-12);
  CHECK(std::abs(r[1] - Complex(-1, 0)) < 1e-12);

  CHECK_THROWS_AS((void)eigenvalues(Matrix::Zero(2, 3)), DimensionError);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS((void)eigenvalues(bad));
}

TEST_CASE("damaged airframe eigenvalues") {
  auto e = sorted(eigenvalues(golden_a()));
  CHECK(std::abs(e[0] - Complex(-1.04, 0)) < 2e-2);
  CHECK(std::abs(e[1]) < 1e-6);
  CHECK(std::abs(e[2] - Complex(0.0917, -0.43)) < 2e-2);
  CHECK(std::abs(e[3] - Complex(0.0917, 0.43)) < 2e-2);
}

TEST_CASE("frequency response examples") {
  StateSpace integ(Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
  const Complex g = freq_response(integ, 1.0)(0, 0);
  CHECK(std::abs(g) == doctest::Approx(1.0));
  CHECK(std::arg(g) * 180 / std::numbers::pi == doctest::Approx(-90.0));
  CHECK_THROWS_AS((void)freq_response(integ, 0.0), NumericalError);

  CHECK(std::abs(freq_response(first_order(1.0), 1.0)(0, 0)) == doctest::Approx(1 / std::sqrt(2.0)));

  TransferMatrix w(1, 1);
  w.set(0, 0, {{4, 1}, {4, 10}});
  CHECK(std::abs(freq_response(to_state_space(w), 0.0)(0, 0)) == doctest::Approx(0.1));
  CHECK_THROWS((void)freq_response(first_order(1.0), -1.0));
}

TEST_CASE("singular values") {
  const auto grid = log_grid(0.1, 10.0, 5);
  const auto sv = singular_values(first_order(2.0), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(sv[i](0) == doctest::Approx(std::abs(freq_response(first_order(2.0), grid[i])(0, 0))));
  }
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 3;
  const auto s2 = singular_values(StateSpace::gain(d), grid);
  CHECK(s2[2](0) == doctest::Approx(3.0));
  CHECK(s2[2](1) == doctest::Approx(2.0));
  CHECK_THROWS((void)singular_values(first_order(1.0), std::vector<double>{}));
  CHECK_THROWS((void)singular_values(first_order(1.0), std::vector<double>{2.0, 1.0}));
}

TEST_CASE("interconnection examples") {
  std::mt19937_64 rng(11);
  const StateSpace g = random_stable(rng, 3, 2, 2);
  const StateSpace gi = series(g, identity_system(2));
  for (double w : log_grid(0.01, 100, 20)) CHECK((freq_response(gi, w) - freq_response(g, w)).norm() < 1e-10);

  const StateSpace k = StateSpace::gain(Matrix::Constant(1, 1, 4.0));
  CHECK(feedback(k).d()(0, 0) == doctest::Approx(0.8));
  CHECK_THROWS_AS((void)feedback(StateSpace::gain(Matrix::Ones(1, 1)), 1), NumericalError);
  CHECK_THROWS_AS((void)series(g, first_order(1.0)), DimensionError);
  CHECK_THROWS_AS((void)parallel(g, first_order(1.0)), DimensionError);
}

TEST_CASE("interconnections match frequency-domain composition") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const StateSpace g1 = random_stable(rng, 3, 2, 3);
    const StateSpace g2 = random_stable(rng, 2, 3, 2);
    const StateSpace g3 = random_stable(rng, 2, 2, 3);
    const StateSpace s = series(g1, g2);
    const StateSpace p = parallel(g1, g3);
    const StateSpace f = feedback(g1, g2, -1);
    const StateSpace pf = feedback(g1, g2, +1);
    const StateSpace ad = append_diagonal(g1, g2);
    CHECK(s.states() == 5);
    for (double w : log_grid(0.01, 100, 50)) {
      const CMatrix a = freq_response(g1, w), b = freq_response(g2, w), c = freq_response(g3, w);
      auto rel = [](const CMatrix& x, const CMatrix& y) { return (x - y).norm() / std::max(1.0, y.norm()); };
      CHECK(rel(freq_response(s, w), b * a) < 1e-8);
      CHECK(rel(freq_response(p, w), a + c) < 1e-8);
      const CMatrix eye = CMatrix::Identity(2, 2);
      CHECK(rel(freq_response(f, w), a * (eye + b * a).inverse()) < 1e-8);
      CHECK(rel(freq_response(pf, w), a * (eye - b * a).inverse()) < 1e-8);
      const CMatrix adw = freq_response(ad, w);
      CHECK(rel(adw.topLeftCorner(3, 2), a) < 1e-8);
      CHECK(rel(adw.bottomRightCorner(2, 3), b) < 1e-8);
      CHECK(adw.topRightCorner(3, 3).norm() < 1e-12);
    }
  }
}

TEST_CASE("close_channels equals feedback on the selected loops") {
  std::mt19937_64 rng(5);
  const StateSpace l = random_stable(rng, 4, 3, 3);
  const int closed[] = {0, 2};
  const StateSpace one = close_channels(l, closed);
  CHECK(one.inputs() == 1);
  for (double w : log_grid(0.1, 10, 7)) {
    const CMatrix lw = freq_response(l, w);
    // partition with channel 1 open
    const std::vector<int> c{0, 2};
    CMatrix lcc(2, 2), lco(2, 1), loc(1, 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) lcc(i, j) = lw(c[i], c[j]);
      lco(i, 0) = lw(c[i], 1);
      loc(0, i) = lw(1, c[i]);
    }
    const CMatrix expect = CMatrix::Constant(1, 1, lw(1, 1)) - loc * (CMatrix::Identity(2, 2) + lcc).inverse() * lco;
    CHECK((freq_response(one, w) - expect).norm() < 1e-9);
  }
}

TEST_CASE("weights realization has additive state count") {
  TransferMatrix w1 = TransferMatrix::diagonal({{{4, 1}, {4, 10}}, {{50, 5}, {18, 25}}});
  TransferMatrix w2 = TransferMatrix::diagonal(
      {{{16}, {1, 16}}, {{120}, {1, 120}}, {{120}, {1, 120}}, {{120}, {1, 120}}});
  StateSpace g(golden_a(), Matrix::Ones(4, 2), Matrix::Identity(4, 4), Matrix::Zero(4, 2));
  const StateSpace gs = series(series(to_state_space(w1), g), to_state_space(w2));
  CHECK(gs.states() == 10);
  for (double w : log_grid(0.1, 10, 5)) {
    const Complex s(0, w);
    CHECK((freq_response(gs, w) - w2.evaluate(s) * freq_response(g, w) * w1.evaluate(s)).norm() < 1e-9);
  }
  CHECK_THROWS((void)to_state_space(TransferMatrix::diagonal({{{1, 2, 3}, {1, 1}}})));
  CHECK_THROWS((void)to_state_space(TransferMatrix::diagonal({{{1}, {0, 1}}})));
}

TEST_CASE("Riccati scalar cases") {
  const Matrix one = Matrix::Ones(1, 1);
  CHECK(solve_are(Matrix::Zero(1, 1), one, one, one)(0, 0) == doctest::Approx(1.0));
  CHECK(solve_are(one, one, Matrix::Zero(1, 1), one)(0, 0) == doctest::Approx(2.0));
  CHECK_THROWS_AS((void)solve_are(one, Matrix::Zero(1, 1), one, one), NumericalError);
  CHECK_THROWS((void)solve_are(one, one, one, -one));
}

TEST_CASE("Riccati residual and stabilizing property on random instances") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> dim(1, 6);
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = dim(rng), m = 1 + trial % 3;
    Matrix a(n, n), b(n, m), c(n, n);
    for (auto* mat : {&a, &b, &c})
      for (Eigen::Index i = 0; i < mat->size(); ++i) mat->data()[i] = nd(rng);
    const Matrix q = c.transpose() * c + 1e-3 * Matrix::Identity(n, n);
    Matrix r = Matrix::Identity(m, m) * (0.5 + trial % 4);
    const Matrix x = solve_are(a, b, q, r);
    CHECK(are_residual(a, b, q, r, x) <= 1e-8);
    CHECK((x - x.transpose()).norm() < 1e-10 * std::max(1.0, x.norm()));
    CHECK(spectral_abscissa(a - b * r.inverse() * b.transpose() * x) < 0.0);
    ++solved;
  }
  CHECK(solved == 100);
}

TEST_CASE("Lyapunov solver") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const StateSpace s = random_stable(rng, 5, 1, 1);
    Matrix q = Matrix::Random(5, 5);
    q = q * q.transpose();
    const Matrix x = solve_lyapunov(s.a(), q);
    CHECK((s.a().transpose() * x + x * s.a() + q).norm() < 1e-9 * std::max(1.0, x.norm()));
  }
}

TEST_CASE("H-infinity norm") {
  CHECK(hinf_norm(first_order(1.0)) == doctest::Approx(1.0).epsilon(1e-6));
  StateSpace allpass(Matrix::Constant(1, 1, -1), Matrix::Ones(1, 1), Matrix::Constant(1, 1, -2),
                     Matrix::Ones(1, 1));  // (s-1)/(s+1)
  CHECK(hinf_norm(allpass) == doctest::Approx(1.0).epsilon(1e-6));
  Matrix d(2, 2);
  d << 1, 2, 3, 4;
  CHECK(hinf_norm(StateSpace::gain(d)) == doctest::Approx(Eigen::JacobiSVD<Matrix>(d).singularValues()(0)));
  CHECK_THROWS_AS((void)hinf_norm(first_order(-1.0)), NumericalError);

  // Lightly damped resonance: peak far above the coarse sweep's resolution.
  Matrix a(2, 2);
  a << 0, 1, -100, -0.02;
  StateSpace res(a, Matrix(Eigen::Vector2d(0, 1)), Matrix(Eigen::RowVector2d(100, 0)), Matrix::Zero(1, 1));
  const double expect = 100.0 / (0.02 * std::sqrt(100.0 - 0.0001));
  CHECK(hinf_norm(res) == doctest::Approx(expect).epsilon(1e-5));
}

TEST_CASE("H-infinity norm of random all-pass factors") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ud(0.1, 5.0);
  std::uniform_int_distribution<int> order(1, 3);
  for (int trial = 0; trial < 30; ++trial) {
    // product of first-order all-pass sections (s - a)/(s + a), scaled by a sign
    const int n = order(rng);
    StateSpace g = StateSpace::gain(Matrix::Constant(1, 1, trial % 2 ? -1.0 : 1.0));
    for (int k = 0; k < n; ++k) {
      const double p = ud(rng);
      g = series(g, StateSpace(Matrix::Constant(1, 1, -p), Matrix::Ones(1, 1), Matrix::Constant(1, 1, -2 * p),
                               Matrix::Ones(1, 1)));
    }
    CHECK(hinf_norm(g) == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("eigenvalues invariant under similarity") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const StateSpace s = random_stable(rng, 5, 2, 2);
    Matrix t = Matrix::Random(5, 5) + 3 * Matrix::Identity(5, 5);
    const auto e1 = sorted(eigenvalues(s.a()));
    const auto e2 = sorted(eigenvalues(s.similarity(t).a()));
    double diff = 0;
    for (std::size_t i = 0; i < e1.size(); ++i) diff = std::max(diff, std::abs(e1[i] - e2[i]));
    CHECK(diff <= 1e-8);
    for (double w : {0.1, 1.0, 10.0}) {
      CHECK((freq_response(s, w) - freq_response(s.similarity(t), w)).norm() < 1e-9);
    }
  }
}

TEST_CASE("step response") {
  const auto st = step_response(StateSpace::gain(Matrix::Constant(1, 1, 3.0)), 1.0, 0.1);
  CHECK(st.time.size() == 11);
  CHECK(st.outputs[0](0, 0) == doctest::Approx(3.0));
  const auto lag = step_response(first_order(1.0), 2.0, 0.01);
  CHECK(lag.outputs[0](100, 0) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-4));
  CHECK_THROWS((void)step_response(first_order(1.0), 1.0, 0.0));

  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const StateSpace s = random_stable(rng, 3, 2, 2);
    double slow = 1e9;
    for (auto l : eigenvalues(s.a())) slow = std::min(slow, std::abs(l.real()));
    const double horizon = 20.0 / slow;
    const auto r = step_response(s, horizon, horizon / 2000);
    const Matrix dc = dc_gain(s);
    for (int j = 0; j < 2; ++j) {
      const Vector last = r.outputs[j].bottomRows(1).transpose();
      CHECK((last - dc.col(j)).norm() <= 1e-3 * std::max(1.0, dc.col(j).norm()));
    }
  }
}

TEST_CASE("damaged airframe diverges in all states") {
  StateSpace g(golden_a(), Matrix::Ones(4, 2), Matrix::Identity(4, 4), Matrix::Zero(4, 2));
  const auto r = step_response(g, 100.0, 0.05);
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 4; ++k) {
      const double early = r.outputs[j].block(0, k, 21, 1).cwiseAbs().maxCoeff();
      CHECK(std::abs(r.outputs[j](2000, k)) > 10 * early);
    }
  }
}

TEST_CASE("modal analysis") {
  const ModeReport rep = modal_analysis(StateSpace(golden_a(), Matrix::Zero(4, 1), Matrix::Zero(1, 4), Matrix::Zero(1, 1)));
  CHECK(rep.modes.size() == 3);
  const Mode& dutch = rep.modes[1];
  CHECK(dutch.damping == doctest::Approx(-0.209).epsilon(0.05));
  CHECK(dutch.frequency == doctest::Approx(0.439).epsilon(0.01));
  REQUIRE(dutch.period.has_value());
  CHECK(*dutch.period == doctest::Approx(14.2969).epsilon(0.01));
  CHECK(rep.modes[2].damping == doctest::Approx(1.0));
  CHECK(rep.modes[2].frequency == doctest::Approx(1.04).epsilon(0.02));

  const ModeReport origin = modal_analysis(StateSpace(Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1)));
  CHECK(origin.modes[0].frequency == 0.0);
  CHECK_FALSE(origin.modes[0].period.has_value());
}

TEST_CASE("minimal realization removes hidden states") {
  const StateSpace g = first_order(2.0);
  const StateSpace padded(Matrix(Eigen::Vector2d(-2, -5).asDiagonal()), Matrix(Eigen::Vector2d(1, 0)),
                          Matrix(Eigen::RowVector2d(1, 0)), Matrix::Zero(1, 1));
  const StateSpace m = minimal_realization(padded);
  CHECK(m.states() == 1);
  for (double w : {0.1, 1.0, 10.0}) CHECK(std::abs(freq_response(m, w)(0, 0) - freq_response(g, w)(0, 0)) < 1e-12);
}
