#include "vrudder/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace vrudder {

void EngineParams::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("engine time constant must be positive");
  if (!(zeta > 0.0)) throw std::invalid_argument("engine damping must be positive");
  if (!(t_d >= 0.0)) throw std::invalid_argument("engine delay must be nonnegative");
  if (!(T_trim >= 0.0 && T_trim < T_max)) throw std::invalid_argument("need 0 <= T_trim < T_max");
  if (!(rate_limit > 0.0) || !(saturation > 0.0)) throw std::invalid_argument("engine limits must be positive");
}

StateSpace engine_state_space(const EngineParams& p) {
  if (!(p.tau > 0.0)) throw std::invalid_argument("engine time constant must be positive");
  const double w = 1.0 / p.tau;
  Matrix a(2, 2);
  a << 0.0, 1.0, -w * w, -2.0 * p.zeta * w;
  Matrix b(2, 1);
  b << 0.0, w * w;
  Matrix c(1, 2);
  c << 1.0, 0.0;
  return StateSpace(a, b, c, Matrix::Zero(1, 1), {"T", "T_dot"}, {"T_c"}, {"T"});
}

StateSpace delay_approximation(double t_d) {
  if (!(t_d >= 0.0)) throw std::invalid_argument("delay must be nonnegative");
  if (t_d == 0.0) return StateSpace::gain(Matrix::Identity(1, 1));
  // (t^2 s^2/12 - t s/2 + 1) / (t^2 s^2/12 + t s/2 + 1)
  TransferMatrix tm(1, 1);
  tm.set(0, 0, {{t_d * t_d / 12.0, -t_d / 2.0, 1.0}, {t_d * t_d / 12.0, t_d / 2.0, 1.0}});
  return to_state_space(tm);
}

int delay_samples(double t_d, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  return static_cast<int>(std::lround(t_d / dt));
}

EngineFilter::EngineFilter(const EngineParams& p, double dt, double initial)
    : x_(Vector::Zero(2)), buffer_(static_cast<std::size_t>(delay_samples(p.t_d, dt)), 0.0), initial_(initial) {
  const auto zoh = discretize_zoh(engine_state_space(p), dt);
  phi_ = zoh.phi;
  gamma_ = zoh.gamma.col(0);
}

double EngineFilter::step(double command) {
  double applied = command - initial_;
  if (!buffer_.empty()) {
    std::swap(applied, buffer_[head_]);
    head_ = (head_ + 1) % buffer_.size();
  }
  x_ = phi_ * x_ + gamma_ * applied;
  return output();
}

double EngineFilter::output() const { return initial_ + x_(0); }

ThrustTrace thrust_step(const EngineParams& p, double command, double duration, double dt) {
  p.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(duration >= 0.0)) throw std::invalid_argument("duration must be nonnegative");
  if (!(command >= 0.0 && command <= p.T_max)) throw std::invalid_argument("command outside [0, T_max]");
  const auto samples = static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
  ThrustTrace out;
  out.time.resize(samples);
  out.commanded.assign(samples, command);
  out.delivered.resize(samples);
  EngineFilter engine(p, dt, p.T_trim);
  out.delivered[0] = engine.output();
  out.time[0] = 0.0;
  for (std::size_t k = 1; k < samples; ++k) {
    out.time[k] = static_cast<double>(k) * dt;
    out.delivered[k] = engine.step(command);
  }
  return out;
}

}  // namespace vrudder
