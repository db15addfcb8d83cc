#include <cmath>

#include "vrudder/lti.hpp"

namespace vrudder {
namespace {

Polynomial strip_leading_zeros(const Polynomial& p) {
  std::size_t first = 0;
  while (first + 1 < p.size() && p[first] == 0.0) ++first;
  return Polynomial(p.begin() + static_cast<std::ptrdiff_t>(first), p.end());
}

bool is_zero(const Polynomial& p) {
  for (double c : p)
    if (c != 0.0) return false;
  return true;
}

void validate(const Rational& r) {
  if (r.den.empty() || r.num.empty()) throw std::invalid_argument("empty polynomial in transfer channel");
  const Polynomial den = strip_leading_zeros(r.den);
  if (r.den.front() == 0.0 || den.front() == 0.0) throw std::invalid_argument("denominator leading coefficient is zero");
  if (!is_zero(r.num) && strip_leading_zeros(r.num).size() > den.size()) {
    throw std::invalid_argument("transfer channel is improper");
  }
  for (double c : r.num)
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite numerator coefficient");
  for (double c : r.den)
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite denominator coefficient");
}

struct ChannelRealization {
  Matrix a;
  Vector b;
  Eigen::RowVectorXd c;
  double d = 0.0;
};

// Controllable canonical form: companion row on top, input into the first state.
ChannelRealization realize(const Rational& r) {
  Polynomial den = strip_leading_zeros(r.den);
  Polynomial num = strip_leading_zeros(r.num);
  const double lead = den.front();
  for (double& c : den) c /= lead;
  for (double& c : num) c /= lead;
  const auto n = static_cast<Eigen::Index>(den.size() - 1);
  Polynomial padded(den.size(), 0.0);
  std::copy(num.begin(), num.end(), padded.end() - static_cast<std::ptrdiff_t>(num.size()));

  ChannelRealization out;
  out.d = padded.front();
  out.a = Matrix::Zero(n, n);
  out.b = Vector::Zero(n);
  out.c = Eigen::RowVectorXd::Zero(n);
  if (n == 0) return out;
  for (Eigen::Index k = 0; k < n; ++k) {
    out.a(0, k) = -den[static_cast<std::size_t>(k + 1)];
    out.c(k) = padded[static_cast<std::size_t>(k + 1)] - out.d * den[static_cast<std::size_t>(k + 1)];
  }
  for (Eigen::Index k = 1; k < n; ++k) out.a(k, k - 1) = 1.0;
  out.b(0) = 1.0;
  return out;
}

}  // namespace

Complex polyval(const Polynomial& p, Complex s) {
  Complex acc = 0.0;
  for (double c : p) acc = acc * s + c;
  return acc;
}

TransferMatrix::TransferMatrix(int outputs, int inputs)
    : outputs_(outputs), inputs_(inputs),
      channels_(static_cast<std::size_t>(outputs * inputs), Rational{{0.0}, {1.0}}) {
  if (outputs <= 0 || inputs <= 0) throw DimensionError("transfer matrix needs positive dimensions");
}

TransferMatrix TransferMatrix::diagonal(const std::vector<Rational>& channels) {
  const int n = static_cast<int>(channels.size());
  TransferMatrix tm(n, n);
  for (int i = 0; i < n; ++i) tm.set(i, i, channels[static_cast<std::size_t>(i)]);
  return tm;
}

void TransferMatrix::set(int output, int input, Rational channel) {
  if (output < 0 || output >= outputs_ || input < 0 || input >= inputs_) {
    throw DimensionError("transfer channel index out of range");
  }
  validate(channel);
  channels_[static_cast<std::size_t>(output * inputs_ + input)] = std::move(channel);
}

const Rational& TransferMatrix::at(int output, int input) const {
  if (output < 0 || output >= outputs_ || input < 0 || input >= inputs_) {
    throw DimensionError("transfer channel index out of range");
  }
  return channels_[static_cast<std::size_t>(output * inputs_ + input)];
}

CMatrix TransferMatrix::evaluate(Complex s) const {
  CMatrix out(outputs_, inputs_);
  for (int i = 0; i < outputs_; ++i) {
    for (int j = 0; j < inputs_; ++j) {
      const Rational& r = at(i, j);
      out(i, j) = polyval(r.num, s) / polyval(r.den, s);
    }
  }
  return out;
}

StateSpace to_state_space(const TransferMatrix& tm) {
  std::vector<ChannelRealization> parts;
  std::vector<std::pair<int, int>> where;
  Eigen::Index total = 0;
  Matrix d = Matrix::Zero(tm.outputs(), tm.inputs());
  for (int i = 0; i < tm.outputs(); ++i) {
    for (int j = 0; j < tm.inputs(); ++j) {
      const Rational& r = tm.at(i, j);
      if (is_zero(r.num)) continue;
      ChannelRealization part = realize(r);
      d(i, j) = part.d;
      total += part.a.rows();
      parts.push_back(std::move(part));
      where.emplace_back(i, j);
    }
  }
  Matrix a = Matrix::Zero(total, total);
  Matrix b = Matrix::Zero(total, tm.inputs());
  Matrix c = Matrix::Zero(tm.outputs(), total);
  Eigen::Index offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto n = parts[k].a.rows();
    a.block(offset, offset, n, n) = parts[k].a;
    b.block(offset, where[k].second, n, 1) = parts[k].b;
    c.block(where[k].first, offset, 1, n) = parts[k].c;
    offset += n;
  }
  return StateSpace(a, b, c, d);
}

}  // namespace vrudder
