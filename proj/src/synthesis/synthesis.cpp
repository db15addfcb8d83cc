#include "vrudder/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace vrudder {
namespace {

Matrix inverse_of(const Matrix& m, const char* what) {
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible() || lu.rcond() < 1e-12) throw NumericalError(std::string("singular matrix in ") + what);
  return lu.inverse();
}

Matrix hcat(const Matrix& l, const Matrix& r) {
  Matrix out(l.rows(), l.cols() + r.cols());
  out.leftCols(l.cols()) = l;
  out.rightCols(r.cols()) = r;
  return out;
}

Matrix vcat(const Matrix& t, const Matrix& b) {
  Matrix out(t.rows() + b.rows(), t.cols());
  out.topRows(t.rows()) = t;
  out.bottomRows(b.rows()) = b;
  return out;
}

std::vector<int> range(int n) {
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

}  // namespace

LoopShapingWeights build_weights() {
  return {TransferMatrix::diagonal({{{4, 1}, {4, 10}}, {{50, 5}, {18, 25}}}),
          TransferMatrix::diagonal({{{16}, {1, 16}}, {{120}, {1, 120}}, {{120}, {1, 120}}, {{120}, {1, 120}}})};
}

LoopShapingWeights identity_weights(int inputs, int outputs) {
  return {TransferMatrix::diagonal(std::vector<Rational>(static_cast<std::size_t>(inputs), {{1}, {1}})),
          TransferMatrix::diagonal(std::vector<Rational>(static_cast<std::size_t>(outputs), {{1}, {1}}))};
}

StateSpace shape_plant(const StateSpace& g, const LoopShapingWeights& w, bool minimal, double tol) {
  if (w.w1.inputs() != g.inputs() || w.w1.outputs() != g.inputs()) {
    throw DimensionError("W1 must be square with the plant's input count");
  }
  if (w.w2.inputs() != g.outputs() || w.w2.outputs() != g.outputs()) {
    throw DimensionError("W2 must be square with the plant's output count");
  }
  const StateSpace w1 = to_state_space(w.w1).with_labels({}, g.input_labels(), g.input_labels());
  const StateSpace w2 = to_state_space(w.w2).with_labels({}, g.output_labels(), g.output_labels());
  StateSpace gs = series(series(w1, g), w2);
  return minimal ? minimal_realization(gs, tol) : gs;
}

CoprimeFactors normalized_coprime_factors(const StateSpace& gs, const Matrix& z) {
  const Matrix& a = gs.a();
  const Matrix& b = gs.b();
  const Matrix& c = gs.c();
  const Matrix& d = gs.d();
  const auto p = gs.outputs();
  const Matrix r = Matrix::Identity(p, p) + d * d.transpose();
  const Matrix h = -(b * d.transpose() + z * c.transpose()) * inverse_of(r, "coprime factors");
  Eigen::SelfAdjointEigenSolver<Matrix> es(r);
  const Matrix r_isqrt = es.operatorInverseSqrt();
  const Matrix af = a + h * c;
  return {StateSpace(af, h, r_isqrt * c, r_isqrt), StateSpace(af, b + h * d, r_isqrt * c, r_isqrt * d)};
}

StateSpace closed_loop(const StateSpace& g, const StateSpace& k) {
  const auto p = g.outputs();
  const auto m = g.inputs();
  if (k.inputs() != p || k.outputs() != m) throw DimensionError("controller must map plant outputs to plant inputs");
  const auto ng = g.states();
  const auto nk = k.states();
  const Matrix e = inverse_of(Matrix::Identity(p, p) + g.d() * k.d(), "closed loop (algebraic loop)");

  // y = Yx xi + Yr w, u = Ux xi + Ur w with xi = [x; xk] and w = [r; d].
  const Matrix yx = e * hcat(g.c(), -g.d() * k.c());
  const Matrix yr = e * hcat(Matrix::Identity(p, p), g.d());
  const Matrix ux = hcat(Matrix::Zero(m, ng), -k.c()) - k.d() * yx;
  const Matrix ur = -k.d() * yr;
  const Matrix d_sel = hcat(Matrix::Zero(m, p), Matrix::Identity(m, m));

  Matrix a(ng + nk, ng + nk);
  a.topRows(ng) = g.b() * ux;
  a.topLeftCorner(ng, ng) += g.a();
  a.bottomRows(nk) = k.b() * yx;
  a.bottomRightCorner(nk, nk) += k.a();
  const Matrix b = vcat(g.b() * (d_sel + ur), k.b() * yr);

  Labels in, out;
  for (const auto& l : g.output_labels()) in.push_back("r_" + l);
  for (const auto& l : g.input_labels()) in.push_back("d_" + l);
  out = g.output_labels();
  for (const auto& l : g.input_labels()) out.push_back(l);
  return StateSpace(a, b, vcat(yx, ux), vcat(yr, ur), {}, in, out);
}

double robust_stability_norm(const StateSpace& g, const StateSpace& k) {
  const StateSpace cl = closed_loop(g, k);
  if (!is_stable(cl)) throw NumericalError("closed loop is not internally stable");
  return hinf_norm(cl);
}

SynthesisResult ncf_synthesis(const StateSpace& gs, double backoff) {
  if (!(backoff > 1.0)) throw std::invalid_argument("gamma backoff must exceed 1");
  const Matrix& a = gs.a();
  const Matrix& b = gs.b();
  const Matrix& c = gs.c();
  const Matrix& d = gs.d();
  const auto n = gs.states();
  const auto m = gs.inputs();
  const auto p = gs.outputs();

  const Matrix s = Matrix::Identity(m, m) + d.transpose() * d;
  const Matrix r = Matrix::Identity(p, p) + d * d.transpose();
  const Matrix s_inv = inverse_of(s, "synthesis");
  const Matrix r_inv = inverse_of(r, "synthesis");
  const Matrix ar = a - b * s_inv * d.transpose() * c;

  SynthesisResult out;
  out.gs = gs;
  try {
    out.x = solve_are(ar, b, c.transpose() * r_inv * c, s);
    out.z = solve_are(ar.transpose(), c.transpose(), b * s_inv * b.transpose(), r);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("synthesis infeasible: ") + e.what());
  }
  double lmax = 0.0;
  for (const Complex& l : eigenvalues(out.x * out.z)) lmax = std::max(lmax, l.real());
  out.gamma_min = std::sqrt(1.0 + lmax);
  out.e_max = 1.0 / out.gamma_min;
  out.gamma = backoff * out.gamma_min;

  const double g2 = out.gamma * out.gamma;
  const Matrix l = (1.0 - g2) * Matrix::Identity(n, n) + out.x * out.z;
  const Matrix f = -s_inv * (d.transpose() * c + b.transpose() * out.x);
  Eigen::FullPivLU<Matrix> lt(l.transpose());
  if (!lt.isInvertible()) throw NumericalError("synthesis: singular L at the chosen gamma");
  const Matrix w = lt.solve(out.z * c.transpose());

  // Central controller written for negative feedback u = -Ks y.
  const Matrix ak = a + b * f + g2 * w * (c + d * f);
  const Matrix bk = g2 * w;
  const Matrix ck = -b.transpose() * out.x;
  const Matrix dk = d.transpose();
  out.ks = StateSpace(ak, bk, ck, dk, {}, gs.output_labels(), gs.input_labels());

  const StateSpace cl = closed_loop(gs, out.ks);
  if (!is_stable(cl)) throw NumericalError("synthesis: shaped closed loop is not internally stable");
  out.verification_norm = hinf_norm(cl);
  if (out.verification_norm > out.gamma * (1.0 + 1e-6)) {
    throw NumericalError("synthesis verification failed: robust stabilization norm " +
                         std::to_string(out.verification_norm) + " exceeds gamma " + std::to_string(out.gamma));
  }
  out.ncf = normalized_coprime_factors(gs, out.z);
  out.w1 = identity_system(static_cast<int>(m));
  out.w2 = identity_system(static_cast<int>(p));
  return out;
}

SynthesisResult design(const StateSpace& g, const LoopShapingWeights& w, double backoff, double tol) {
  SynthesisResult r = ncf_synthesis(shape_plant(g, w, true, tol), backoff);
  r.w1 = to_state_space(w.w1).with_labels({}, g.input_labels(), g.input_labels());
  r.w2 = to_state_space(w.w2).with_labels({}, g.output_labels(), g.output_labels());
  return r;
}

StateSpace final_controller(const SynthesisResult& r, const StateSpace& plant) {
  const StateSpace k = series(series(r.w2, r.ks), r.w1);
  const StateSpace cl = closed_loop(plant, k);
  if (!is_stable(cl)) {
    throw NumericalError("final controller does not stabilize the plant (spectral abscissa " +
                         std::to_string(spectral_abscissa(cl.a())) + ")");
  }
  return k;
}

Matrix prefilter_gain(const SynthesisResult& r, const std::vector<int>& channels) {
  Matrix full;
  try {
    full = dc_gain(r.ks) * dc_gain(r.w2);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("prefilter undefined: ") + e.what());
  }
  Matrix out(full.rows(), static_cast<Eigen::Index>(channels.size()));
  for (std::size_t j = 0; j < channels.size(); ++j) {
    if (channels[j] < 0 || channels[j] >= full.cols()) throw DimensionError("prefilter channel out of range");
    out.col(static_cast<Eigen::Index>(j)) = full.col(channels[j]);
  }
  return out;
}

ClosedLoopMaps closed_loop_maps(const StateSpace& g, const StateSpace& k) {
  const StateSpace cl = closed_loop(g, k);
  const int p = static_cast<int>(g.outputs());
  const int m = static_cast<int>(g.inputs());
  std::vector<int> r_in = range(p), d_in, y_out = range(p), u_out;
  for (int i = 0; i < m; ++i) {
    d_in.push_back(p + i);
    u_out.push_back(p + i);
  }
  ClosedLoopMaps maps;
  maps.s_out = cl.select(r_in, y_out);                       // (I + GK)^-1
  maps.t_out = parallel(identity_system(p), negate(maps.s_out));
  maps.t_in = negate(cl.select(d_in, u_out));                // KG (I + KG)^-1
  maps.s_in = parallel(identity_system(m), negate(maps.t_in));
  return maps;
}

}  // namespace vrudder
