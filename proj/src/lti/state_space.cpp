#include "vrudder/lti.hpp"

#include <algorithm>
#include <cmath>

namespace vrudder {
namespace {

Labels fill_labels(Labels labels, Eigen::Index count, const char* prefix) {
  if (labels.empty()) {
    labels.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) labels.push_back(prefix + std::to_string(i + 1));
  }
  if (static_cast<Eigen::Index>(labels.size()) != count) {
    throw DimensionError(std::string("label count mismatch for ") + prefix);
  }
  return labels;
}

Labels concat(const Labels& a, const Labels& b) {
  Labels out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
  Matrix out(top.rows() + bottom.rows(), std::max(top.cols(), bottom.cols()));
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

Matrix hstack(const Matrix& left, const Matrix& right) {
  Matrix out(std::max(left.rows(), right.rows()), left.cols() + right.cols());
  out.leftCols(left.cols()) = left;
  out.rightCols(right.cols()) = right;
  return out;
}

Matrix invert_loop(const Matrix& m, const char* what) {
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible() || lu.rcond() < 1e-12) {
    throw NumericalError(std::string("algebraic loop is singular in ") + what);
  }
  return lu.inverse();
}

}  // namespace

StateSpace::StateSpace(Matrix a, Matrix b, Matrix c, Matrix d, Labels states, Labels inputs,
                       Labels outputs)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  const auto n = a_.rows();
  if (a_.cols() != n) throw DimensionError("A must be square");
  if (b_.rows() != n) throw DimensionError("B must have as many rows as A");
  if (c_.cols() != n) throw DimensionError("C must have as many columns as A");
  if (d_.rows() != c_.rows() || d_.cols() != b_.cols()) throw DimensionError("D must be outputs x inputs");
  if (!a_.allFinite() || !b_.allFinite() || !c_.allFinite() || !d_.allFinite()) {
    throw std::invalid_argument("state-space matrices must be finite");
  }
  state_labels_ = fill_labels(std::move(states), n, "x");
  input_labels_ = fill_labels(std::move(inputs), b_.cols(), "u");
  output_labels_ = fill_labels(std::move(outputs), c_.rows(), "y");
}

StateSpace StateSpace::gain(const Matrix& d, Labels inputs, Labels outputs) {
  return StateSpace(Matrix::Zero(0, 0), Matrix::Zero(0, d.cols()), Matrix::Zero(d.rows(), 0), d, {},
                    std::move(inputs), std::move(outputs));
}

StateSpace StateSpace::with_labels(Labels states, Labels inputs, Labels outputs) const {
  return StateSpace(a_, b_, c_, d_, std::move(states), std::move(inputs), std::move(outputs));
}

StateSpace StateSpace::similarity(const Matrix& t) const {
  if (t.rows() != states() || t.cols() != states()) throw DimensionError("similarity transform size");
  Eigen::PartialPivLU<Matrix> lu(t);
  const Matrix tinv = lu.inverse();
  return StateSpace(tinv * a_ * t, tinv * b_, c_ * t, d_, {}, input_labels_, output_labels_);
}

StateSpace StateSpace::select(std::span<const int> in, std::span<const int> out) const {
  Matrix b(states(), static_cast<Eigen::Index>(in.size()));
  Matrix c(static_cast<Eigen::Index>(out.size()), states());
  Matrix d(static_cast<Eigen::Index>(out.size()), static_cast<Eigen::Index>(in.size()));
  Labels il, ol;
  for (std::size_t j = 0; j < in.size(); ++j) {
    if (in[j] < 0 || in[j] >= inputs()) throw DimensionError("input index out of range");
    b.col(static_cast<Eigen::Index>(j)) = b_.col(in[j]);
    il.push_back(input_labels_[static_cast<std::size_t>(in[j])]);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0 || out[i] >= outputs()) throw DimensionError("output index out of range");
    c.row(static_cast<Eigen::Index>(i)) = c_.row(out[i]);
    ol.push_back(output_labels_[static_cast<std::size_t>(out[i])]);
    for (std::size_t j = 0; j < in.size(); ++j) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d_(out[i], in[j]);
    }
  }
  return StateSpace(a_, b, c, d, state_labels_, il, ol);
}

StateSpace series(const StateSpace& first, const StateSpace& second) {
  if (first.outputs() != second.inputs()) {
    throw DimensionError("series: outputs of first (" + std::to_string(first.outputs()) +
                         ") != inputs of second (" + std::to_string(second.inputs()) + ")");
  }
  const auto n1 = first.states();
  const auto n2 = second.states();
  Matrix a = Matrix::Zero(n1 + n2, n1 + n2);
  a.topLeftCorner(n1, n1) = first.a();
  a.bottomLeftCorner(n2, n1) = second.b() * first.c();
  a.bottomRightCorner(n2, n2) = second.a();
  const Matrix b = vstack(first.b(), second.b() * first.d());
  const Matrix c = hstack(second.d() * first.c(), second.c());
  return StateSpace(a, b, c, second.d() * first.d(), concat(first.state_labels(), second.state_labels()),
                    first.input_labels(), second.output_labels());
}

StateSpace parallel(const StateSpace& sys1, const StateSpace& sys2) {
  if (sys1.inputs() != sys2.inputs() || sys1.outputs() != sys2.outputs()) {
    throw DimensionError("parallel: systems must share input and output sizes");
  }
  const Matrix b = vstack(sys1.b(), sys2.b());
  const Matrix c = hstack(sys1.c(), sys2.c());
  return StateSpace(block_diag(sys1.a(), sys2.a()), b, c, sys1.d() + sys2.d(),
                    concat(sys1.state_labels(), sys2.state_labels()), sys1.input_labels(),
                    sys1.output_labels());
}

StateSpace append_diagonal(const StateSpace& sys1, const StateSpace& sys2) {
  return StateSpace(block_diag(sys1.a(), sys2.a()), block_diag(sys1.b(), sys2.b()),
                    block_diag(sys1.c(), sys2.c()), block_diag(sys1.d(), sys2.d()),
                    concat(sys1.state_labels(), sys2.state_labels()),
                    concat(sys1.input_labels(), sys2.input_labels()),
                    concat(sys1.output_labels(), sys2.output_labels()));
}

StateSpace feedback(const StateSpace& forward, const StateSpace& back, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("feedback sign must be +1 or -1");
  if (back.inputs() != forward.outputs() || back.outputs() != forward.inputs()) {
    throw DimensionError("feedback: back path must map forward outputs to forward inputs");
  }
  const double s = sign;
  const auto n1 = forward.states();
  const auto n2 = back.states();
  const auto p = forward.outputs();
  const Matrix e = invert_loop(Matrix::Identity(p, p) - s * forward.d() * back.d(), "feedback");

  // y1 = E (C1 x1 + s D1 C2 x2 + D1 r);  u1 = r + s C2 x2 + s D2 y1
  const Matrix y_x = hstack(e * forward.c(), s * e * forward.d() * back.c());
  const Matrix y_r = e * forward.d();
  const Matrix u_x =
      hstack(Matrix::Zero(forward.inputs(), n1), s * back.c()) + s * back.d() * y_x;
  const Matrix u_r = Matrix::Identity(forward.inputs(), forward.inputs()) + s * back.d() * y_r;

  Matrix a = Matrix::Zero(n1 + n2, n1 + n2);
  a.topRows(n1) = forward.b() * u_x;
  a.topLeftCorner(n1, n1) += forward.a();
  a.bottomRows(n2) = back.b() * y_x;
  a.bottomRightCorner(n2, n2) += back.a();
  const Matrix b = vstack(forward.b() * u_r, back.b() * y_r);
  return StateSpace(a, b, y_x, y_r, concat(forward.state_labels(), back.state_labels()),
                    forward.input_labels(), forward.output_labels());
}

StateSpace feedback(const StateSpace& loop, int sign) {
  if (loop.inputs() != loop.outputs()) throw DimensionError("unity feedback needs a square loop");
  return feedback(loop, identity_system(static_cast<int>(loop.inputs())), sign);
}

StateSpace close_channels(const StateSpace& loop, std::span<const int> closed) {
  if (loop.inputs() != loop.outputs()) throw DimensionError("close_channels needs a square loop");
  const int m = static_cast<int>(loop.inputs());
  std::vector<int> shut(closed.begin(), closed.end());
  std::vector<int> open;
  for (int i = 0; i < m; ++i) {
    if (std::find(shut.begin(), shut.end(), i) == shut.end()) open.push_back(i);
  }
  for (int i : shut) {
    if (i < 0 || i >= m) throw DimensionError("close_channels: channel out of range");
  }
  auto pick = [](const Matrix& src, const std::vector<int>& rows, const std::vector<int>& cols) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = src(rows[i], cols[j]);
    return out;
  };
  std::vector<int> all_states(static_cast<std::size_t>(loop.states()));
  for (std::size_t i = 0; i < all_states.size(); ++i) all_states[i] = static_cast<int>(i);

  const Matrix bc = pick(loop.b(), all_states, shut);
  const Matrix bo = pick(loop.b(), all_states, open);
  const Matrix cc = pick(loop.c(), shut, all_states);
  const Matrix co = pick(loop.c(), open, all_states);
  const Matrix dcc = pick(loop.d(), shut, shut);
  const Matrix dco = pick(loop.d(), shut, open);
  const Matrix doc = pick(loop.d(), open, shut);
  const Matrix doo = pick(loop.d(), open, open);
  const auto nc = static_cast<Eigen::Index>(shut.size());
  const Matrix e = invert_loop(Matrix::Identity(nc, nc) + dcc, "close_channels");

  Labels in, out;
  for (int i : open) {
    in.push_back(loop.input_labels()[static_cast<std::size_t>(i)]);
    out.push_back(loop.output_labels()[static_cast<std::size_t>(i)]);
  }
  return StateSpace(loop.a() - bc * e * cc, bo - bc * e * dco, co - doc * e * cc, doo - doc * e * dco,
                    loop.state_labels(), in, out);
}

StateSpace scale_output(const StateSpace& sys, const Matrix& gain) {
  return series(sys, StateSpace::gain(gain));
}

StateSpace scale_input(const StateSpace& sys, const Matrix& gain) {
  return series(StateSpace::gain(gain), sys);
}

StateSpace negate(const StateSpace& sys) {
  return StateSpace(sys.a(), sys.b(), -sys.c(), -sys.d(), sys.state_labels(), sys.input_labels(),
                    sys.output_labels());
}

StateSpace identity_system(int size) { return StateSpace::gain(Matrix::Identity(size, size)); }

}  // namespace vrudder
