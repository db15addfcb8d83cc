#include "vrudder/robustness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace vrudder {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1) and (0, 1] from the top 53 bits.
double open_uniform(std::mt19937_64& g) { return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53; }
double half_open_uniform(std::mt19937_64& g) { return (static_cast<double>(g() >> 11) + 1.0) * 0x1.0p-53; }

double normal(std::mt19937_64& g) {
  const double u1 = open_uniform(g);
  const double u2 = open_uniform(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

MetricSummary summarize(const std::vector<double>& v) {
  MetricSummary s;
  if (v.empty()) return s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = std::clamp(sum / static_cast<double>(v.size()), s.min, s.max);
  return s;
}

RunResult run_one(const StateSpace& plant, const LoopShapingController& ctrl, const MappingParams& mapping,
                  const UncertaintySpec& spec, const SimConfig& cfg, int index) {
  RunResult r;
  r.index = index;
  const Matrix delta = sample_perturbation(spec, index);
  r.delta_norm = delta.size() ? Eigen::JacobiSVD<Matrix>(delta).singularValues()(0) : 0.0;
  try {
    const SimTrace tr = simulate_closed_loop(plant, ctrl, mapping, cfg, &delta);
    r.stable = tr.settled;
    r.settling_time = tr.settling_time;
    r.rate_limit_hits = tr.rate_limit_hits;
    for (std::size_t i = 0; i < tr.time.size(); ++i) {
      r.peak_da = std::max(r.peak_da, std::abs(tr.da[i]));
      r.peak_dT = std::max(r.peak_dT, std::abs(tr.dT[i]));
    }
    const double t_end = tr.time.back();
    double sum = 0.0;
    std::size_t n = 0;
    r.steady_dT_low = std::numeric_limits<double>::infinity();
    r.steady_dT_high = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tr.time.size(); ++i) {
      if (tr.time[i] < t_end - cfg.settle_window - 1e-12) continue;
      sum += tr.dT[i];
      ++n;
      r.steady_dT_low = std::min(r.steady_dT_low, tr.dT[i]);
      r.steady_dT_high = std::max(r.steady_dT_high, tr.dT[i]);
    }
    r.steady_dT = sum / static_cast<double>(n);
    if (!r.stable) r.failure = "unsettled";
  } catch (const NumericalError& e) {
    r.stable = false;
    r.settling_time = std::numeric_limits<double>::infinity();
    r.failure = "diverged";
  }
  return r;
}

}  // namespace

void UncertaintySpec::validate() const {
  if (!(level >= 0.0 && level <= 1.0)) throw std::invalid_argument("uncertainty level must be in [0, 1]");
  if (count < 1) throw std::invalid_argument("sample count must be at least 1");
  if (structure != "full_block_additive") throw std::invalid_argument("unsupported uncertainty structure: " + structure);
  if (!(reference_gain >= 0.0) || !std::isfinite(reference_gain)) {
    throw std::invalid_argument("reference gain must be finite and nonnegative");
  }
}

ReferenceGain crossover_reference_gain(const StateSpace& plant, const StateSpace& k) {
  const StateSpace loop = series(plant, k);
  const auto grid = log_grid(1e-2, 1e2, 400);
  std::optional<std::size_t> cross;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (max_singular_value(freq_response(loop, grid[i])) >= 1.0) cross = i;
  }
  if (!cross) throw NumericalError("loop gain never reaches 1 on the reference grid");
  const double w = grid[*cross];
  return {w, max_singular_value(freq_response(plant, w))};
}

std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run_index) {
  return splitmix64(splitmix64(seed) ^ run_index);
}

Matrix sample_perturbation(const UncertaintySpec& spec, int run_index) {
  spec.validate();
  if (run_index < 0) throw std::invalid_argument("run index must be nonnegative");
  if (spec.level == 0.0) return Matrix::Zero(4, 2);
  std::mt19937_64 gen(run_seed(spec.seed, static_cast<std::uint64_t>(run_index)));
  Matrix dir(4, 2);
  for (Eigen::Index j = 0; j < dir.cols(); ++j)
    for (Eigen::Index i = 0; i < dir.rows(); ++i) dir(i, j) = normal(gen);
  const double norm = Eigen::JacobiSVD<Matrix>(dir).singularValues()(0);
  const double magnitude = spec.level * spec.reference_gain * half_open_uniform(gen);
  return dir * (magnitude / norm);
}

MonteCarloReport run_campaign(const StateSpace& plant, const LoopShapingController& ctrl, const MappingParams& mapping,
                              const UncertaintySpec& spec, const SimConfig& cfg, unsigned threads) {
  spec.validate();
  cfg.validate();
  const SimTrace nominal = simulate_closed_loop(plant, ctrl, mapping, cfg);
  if (!nominal.settled) throw NumericalError("nominal closed loop does not settle; campaign aborted");

  std::vector<RunResult> runs(static_cast<std::size_t>(spec.count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < spec.count; i = next++) {
      runs[static_cast<std::size_t>(i)] = run_one(plant, ctrl, mapping, spec, cfg, i);
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(spec.count));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  MonteCarloReport rep;
  rep.runs = std::move(runs);
  std::vector<double> settle, da, dT, ss;
  int stable = 0;
  for (const RunResult& r : rep.runs) {
    if (r.rate_limit_hits > 0) ++rep.rate_limit_hit_runs;
    rep.rate_limit_hits += r.rate_limit_hits;
    if (!r.stable) continue;
    ++stable;
    settle.push_back(r.settling_time);
    da.push_back(r.peak_da);
    dT.push_back(r.peak_dT);
    ss.push_back(r.steady_dT);
  }
  rep.stable_fraction = static_cast<double>(stable) / static_cast<double>(rep.runs.size());
  rep.settling = summarize(settle);
  rep.peak_da = summarize(da);
  rep.peak_dT = summarize(dT);
  rep.steady_dT = summarize(ss);
  return rep;
}

std::vector<int> worst_case_summary(const MonteCarloReport& report) {
  if (report.runs.empty()) throw std::invalid_argument("empty report");
  std::vector<const RunResult*> order;
  for (const RunResult& r : report.runs) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const RunResult* a, const RunResult* b) {
    if (a->stable != b->stable) return !a->stable;
    if (a->settling_time != b->settling_time) return a->settling_time > b->settling_time;
    if (a->peak_dT != b->peak_dT) return a->peak_dT > b->peak_dT;
    return a->index < b->index;
  });
  std::vector<int> out;
  for (const RunResult* r : order) out.push_back(r->index);
  return out;
}

}  // namespace vrudder
