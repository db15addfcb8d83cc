#include <cmath>
#include <limits>
#include <numbers>

#include "vrudder/synthesis.hpp"

namespace vrudder {

DiskMargin disk_margin(const StateSpace& loop) {
  if (loop.inputs() != loop.outputs()) throw DimensionError("disk margin needs a square loop");
  const int m = static_cast<int>(loop.inputs());
  const StateSpace s = feedback(identity_system(m), loop, -1);  // (I + L)^-1
  if (!is_stable(s)) throw NumericalError("disk margin: nominal closed loop is unstable");
  // (I - L)(I + L)^-1 = 2 (I + L)^-1 - I
  const StateSpace skew = parallel(scale_output(s, 2.0 * Matrix::Identity(m, m)),
                                   StateSpace::gain(-Matrix::Identity(m, m)));
  const double norm = hinf_norm(skew);

  DiskMargin out;
  const double inf = std::numeric_limits<double>::infinity();
  out.alpha = norm <= 1e-12 ? inf : 1.0 / norm;
  if (out.alpha >= 2.0) {
    out.gain_low = 0.0;
    out.gain_high = inf;
  } else {
    out.gain_low = (2.0 - out.alpha) / (2.0 + out.alpha);
    out.gain_high = (2.0 + out.alpha) / (2.0 - out.alpha);
  }
  out.phase_deg = 2.0 * std::atan(out.alpha / 2.0) * 180.0 / std::numbers::pi;
  return out;
}

MarginReport design_margins(const StateSpace& g, const StateSpace& k) {
  const StateSpace l_in = series(g, k);   // K G
  const StateSpace l_out = series(k, g);  // G K
  auto loop_at_a_time = [](const StateSpace& l) {
    std::vector<DiskMargin> out;
    const int n = static_cast<int>(l.inputs());
    for (int i = 0; i < n; ++i) {
      std::vector<int> others;
      for (int j = 0; j < n; ++j)
        if (j != i) others.push_back(j);
      out.push_back(disk_margin(close_channels(l, others)));
    }
    return out;
  };
  MarginReport rep;
  rep.inputs = loop_at_a_time(l_in);
  rep.outputs = loop_at_a_time(l_out);
  rep.multiloop_input = disk_margin(l_in);
  rep.multiloop_output = disk_margin(l_out);
  return rep;
}

}  // namespace vrudder
