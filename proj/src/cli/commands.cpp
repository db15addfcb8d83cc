#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iostream>
#include <numbers>

#include "vrudder/cli.hpp"

namespace vrudder {
namespace fs = std::filesystem;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
const char* const kStateNames[] = {"phi", "p", "beta", "r"};

struct Design {
  StateSpace plant;
  SynthesisResult synthesis;
  LoopShapingController controller;
  StateSpace k;  // W1 Ks W2
};

Design build_design(const AppConfig& cfg) {
  Design d{config_plant(cfg), {}, {}, StateSpace::gain(Matrix(0, 0))};
  d.synthesis = design(d.plant, cfg.weights, cfg.gamma_backoff, cfg.minimal_tol);
  d.controller = {d.synthesis.w1, d.synthesis.ks, d.synthesis.w2, prefilter_gain(d.synthesis, cfg.command_channels)};
  d.k = final_controller(d.synthesis, d.plant);
  return d;
}

double peak_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double peak_slope(const std::vector<double>& t, const std::vector<double>& y) {
  double m = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) m = std::max(m, std::abs(y[i] - y[i - 1]) / (t[i] - t[i - 1]));
  return m;
}

double window_mean(const std::vector<double>& t, const std::vector<double>& y, double window) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (t[i] >= t.back() - window - 1e-12) sum += y[i], ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

void add_margin(Report& rep, const std::string& prefix, const DiskMargin& m) {
  rep.add(prefix + ".alpha", m.alpha);
  rep.add(prefix + ".gain_low", m.gain_low);
  rep.add(prefix + ".gain_high", m.gain_high);
  rep.add(prefix + ".phase_deg", m.phase_deg);
}

void plot_states(const fs::path& out, const std::string& file, const std::string& title, const SimTrace& t,
                 CommandResult& res) {
  write_svg_plot(out / file, title, "deg, deg/s", t.time,
                 {{"phi (deg)", &t.phi}, {"p (deg/s)", &t.p}, {"beta (deg)", &t.beta}, {"r (deg/s)", &t.r}});
  res.files.push_back(file);
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"model", "modes",  "engine", "map",  "openloop",
                                              "synth", "margins", "sim",   "monte"};
  return names;
}

void apply_overrides(AppConfig& cfg, const CommandOptions& opt) {
  if (opt.seed) cfg.monte.seed = *opt.seed;
  if (opt.runs) cfg.monte.count = *opt.runs;
  if (opt.uncertainty) cfg.monte.level = *opt.uncertainty;
  if (opt.dt) cfg.sim.dt = *opt.dt;
  if (opt.duration) cfg.sim.duration = *opt.duration;
  try {
    cfg.sim.validate();
    cfg.monte.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("flag override: ") + e.what());
  }
}

MappingParams config_mapping(const AppConfig& cfg) {
  MappingParams m = make_mapping(cfg.flight, cfg.geometry, cfg.derivatives.CN_dr, cfg.engine);
  if (cfg.k_map) m.k_map = *cfg.k_map;
  return m;
}

StateSpace config_plant(const AppConfig& cfg) {
  if (cfg.plant_source == "golden") return golden_plant();
  const DerivativeSet damaged = damage_derivatives(cfg.derivatives, cfg.flight, cfg.geometry, cfg.inertia_damaged);
  const DimensionalDerivatives dim = dimensionalize(damaged, cfg.flight, cfg.geometry, cfg.inertia_damaged);
  const auto overrides = cfg.pin_published ? published_overrides() : std::vector<EntryOverride>{};
  return assemble_plant(dim, cfg.flight, cfg.trim, cfg.inertia_damaged, cfg.geometry, config_mapping(cfg).k_map,
                        overrides)
      .plant;
}

CommandResult cmd_model(const AppConfig& cfg, const fs::path&) {
  CommandResult res;
  Report& rep = res.report;
  const StateSpace plant = config_plant(cfg);
  const MappingParams map = config_mapping(cfg);
  rep.add("plant.source", cfg.plant_source);
  rep.add("plant.pin_published", cfg.pin_published);
  rep.add("k_map_lbf_per_rad", map.k_map);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) rep.add("A." + std::to_string(i + 1) + std::to_string(j + 1), plant.a()(i, j));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) rep.add("B." + std::to_string(i + 1) + std::to_string(j + 1), plant.b()(i, j));

  // Entries recomputed from the tabulated data, against the plant in use.
  const DerivativeSet damaged = damage_derivatives(cfg.derivatives, cfg.flight, cfg.geometry, cfg.inertia_damaged);
  const DimensionalDerivatives dim = dimensionalize(damaged, cfg.flight, cfg.geometry, cfg.inertia_damaged);
  const AssembledPlant formula =
      assemble_plant(dim, cfg.flight, cfg.trim, cfg.inertia_damaged, cfg.geometry, map.k_map, {});
  rep.add("derived.CL_r", damaged.CL_r);
  for (const auto& [i, j] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {1, 3}, {2, 0}, {3, 1}, {1, 0}, {3, 0}}) {
    const std::string key = "formula.A." + std::to_string(i + 1) + std::to_string(j + 1);
    const double f = formula.plant.a()(i, j);
    rep.add(key, f);
    if (plant.a()(i, j) != 0.0) rep.add(key + ".relative_error", std::abs(f - plant.a()(i, j)) / std::abs(plant.a()(i, j)));
  }
  for (const auto& [i, j] : std::vector<std::pair<int, int>>{{1, 0}, {1, 1}, {3, 0}, {3, 1}}) {
    const std::string key = "formula.B." + std::to_string(i + 1) + std::to_string(j + 1);
    const double f = formula.plant.b()(i, j);
    rep.add(key, f);
    if (plant.b()(i, j) != 0.0) rep.add(key + ".relative_error", std::abs(f - plant.b()(i, j)) / std::abs(plant.b()(i, j)));
  }
  return res;
}

CommandResult cmd_modes(const AppConfig& cfg, const fs::path& out) {
  CommandResult res;
  const ModeReport modes = lateral_modes(config_plant(cfg));
  std::string csv = "mode,real,imag,damping,frequency,period\n";
  for (const Mode& m : modes.modes) {
    const std::string p = "mode." + m.name;
    res.report.add(p + ".real", m.pole.real());
    res.report.add(p + ".imag", m.pole.imag());
    res.report.add(p + ".damping", m.damping);
    res.report.add(p + ".frequency", m.frequency);
    res.report.add(p + ".period", m.period.value_or(std::numeric_limits<double>::infinity()));
    csv += m.name + "," + format_number(m.pole.real()) + "," + format_number(m.pole.imag()) + "," +
           format_number(m.damping) + "," + format_number(m.frequency) + "," +
           format_number(m.period.value_or(std::numeric_limits<double>::infinity())) + "\n";
  }
  write_text(out / "modes.csv", csv);
  res.files.push_back("modes.csv");
  return res;
}

CommandResult cmd_engine(const AppConfig& cfg, const fs::path& out) {
  CommandResult res;
  const EngineDemo& d = cfg.engine_demo;
  const ThrustTrace tr = thrust_step(cfg.engine, d.command, d.duration, d.dt);
  write_columns_csv(out / "engine.csv", {"t", "T_cmd_lbf", "T_lbf"}, {&tr.time, &tr.commanded, &tr.delivered});
  write_svg_plot(out / "engine.svg", "Engine thrust step", "thrust (lbf)", tr.time,
                 {{"commanded", &tr.commanded}, {"delivered", &tr.delivered}});
  res.files = {"engine.csv", "engine.svg"};

  const double start = tr.delivered.front();
  const double span = d.command - start;
  Report& rep = res.report;
  rep.add("initial_lbf", start);
  rep.add("command_lbf", d.command);
  rep.add("final_lbf", tr.delivered.back());
  const auto at12 = static_cast<std::size_t>(std::lround(12.0 / d.dt));
  if (at12 < tr.time.size()) {
    rep.add("thrust_at_12s_lbf", tr.delivered[at12]);
    rep.add("fraction_at_12s", span != 0.0 ? (tr.delivered[at12] - start) / span : 1.0);
  }
  std::optional<double> t98;
  for (std::size_t i = 0; i < tr.time.size(); ++i) {
    if (std::abs(tr.delivered[i] - start) >= 0.98 * std::abs(span)) {
      t98 = tr.time[i];
      break;
    }
  }
  rep.add("t98_s", t98.value_or(std::numeric_limits<double>::infinity()));
  rep.add("peak_slope_lbf_per_s", peak_slope(tr.time, tr.delivered));
  rep.add("rate_limit_lbf_per_s", cfg.engine.rate_limit);
  return res;
}

CommandResult cmd_map(const AppConfig& cfg, const fs::path& out) {
  CommandResult res;
  const MappingParams map = config_mapping(cfg);
  const MapDemo& d = cfg.map_demo;
  const auto n = static_cast<std::size_t>(std::floor(d.duration / d.dt + 1e-9)) + 1;
  std::vector<double> t(n), rudder(n, d.rudder_deg), cmd(n, rudder_to_thrust(d.rudder_deg * kDeg, map.k_map));
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) * d.dt;
  const std::vector<double> delivered = available_thrust(cmd, map, d.dt);
  write_columns_csv(out / "map.csv", {"t", "rudder_deg", "dT_cmd_lbf", "dT_lbf"}, {&t, &rudder, &cmd, &delivered});
  write_svg_plot(out / "map.svg", "Rudder-equivalent differential thrust", "dT (lbf)", t,
                 {{"commanded", &cmd}, {"delivered", &delivered}});
  res.files = {"map.csv", "map.svg"};

  Report& rep = res.report;
  rep.add("k_map_lbf_per_rad", map.k_map);
  rep.add("thrust_per_deg_lbf", rudder_to_thrust(kDeg, map.k_map));
  rep.add("rudder_deg", d.rudder_deg);
  rep.add("commanded_lbf", cmd.front());
  rep.add("delivered_final_lbf", delivered.back());
  rep.add("peak_slope_lbf_per_s", peak_slope(t, delivered));
  rep.add("saturation_lbf", map.saturation);
  rep.add("rate_limit_lbf_per_s", map.rate_limit);
  return res;
}

CommandResult cmd_openloop(const AppConfig& cfg, const fs::path& out) {
  CommandResult res;
  SimConfig sc = cfg.sim;
  sc.duration = cfg.openloop_duration;
  const SimTrace tr = simulate_open_loop(config_plant(cfg), sc, config_mapping(cfg).k_map);
  write_trace_csv(out / "openloop.csv", tr);
  res.files.push_back("openloop.csv");
  plot_states(out, "openloop.svg", "Open-loop response, damaged aircraft", tr, res);

  const auto flags = divergence_flags(tr);
  const std::array<const std::vector<double>*, 4> ys{&tr.phi, &tr.p, &tr.beta, &tr.r};
  bool all = true;
  for (int s = 0; s < 4; ++s) {
    res.report.add(std::string("diverged.") + kStateNames[s], flags[static_cast<std::size_t>(s)]);
    res.report.add(std::string("final.") + kStateNames[s], ys[static_cast<std::size_t>(s)]->back());
    all = all && flags[static_cast<std::size_t>(s)];
  }
  res.report.add("diverged.all", all);
  return res;
}

CommandResult cmd_synth(const AppConfig& cfg, const fs::path& out) {
  CommandResult res;
  const Design d = build_design(cfg);
  const SynthesisResult& r = d.synthesis;
  Report& rep = res.report;
  rep.add("shaped_states", static_cast<long long>(r.gs.states()));
  rep.add("ks_states", static_cast<long long>(r.ks.states()));
  rep.add("controller_states", static_cast<long long>(d.k.states()));
  rep.add("gamma_min", r.gamma_min);
  rep.add("e_max", r.e_max);
  rep.add("gamma", r.gamma);
  rep.add("verification_norm", r.verification_norm);
  const auto grid = log_grid(1e-3, 1e3, 50);
  double ncf_err = 0.0;
  for (double w : grid) {
    const CMatrix m = freq_response(r.ncf.m, w);
    const CMatrix n = freq_response(r.ncf.n, w);
    const CMatrix e = m * m.adjoint() + n * n.adjoint() - CMatrix::Identity(m.rows(), m.rows());
    ncf_err = std::max(ncf_err, e.cwiseAbs().maxCoeff());
  }
  rep.add("ncf_identity_error", ncf_err);
  rep.add("closed_loop_stable", is_stable(closed_loop(d.plant, d.k)));
  for (Eigen::Index i = 0; i < d.controller.prefilter.rows(); ++i)
    for (Eigen::Index j = 0; j < d.controller.prefilter.cols(); ++j)
      rep.add("prefilter." + std::to_string(i + 1) + std::to_string(j + 1), d.controller.prefilter(i, j));

  const auto plot_grid = log_grid(1e-2, 1e2, 200);
  std::vector<double> logw, g_hi, g_lo, gs_hi, gs_lo;
  for (double w : plot_grid) {
    logw.push_back(std::log10(w));
    const Eigen::JacobiSVD<CMatrix> sg(freq_response(d.plant, w));
    const Eigen::JacobiSVD<CMatrix> ss(freq_response(r.gs, w));
    g_hi.push_back(20 * std::log10(sg.singularValues()(0)));
    g_lo.push_back(20 * std::log10(sg.singularValues().tail(1)(0)));
    gs_hi.push_back(20 * std::log10(ss.singularValues()(0)));
    gs_lo.push_back(20 * std::log10(ss.singularValues().tail(1)(0)));
  }
  write_columns_csv(out / "synth_sv.csv", {"log10_w", "G_max_db", "G_min_db", "Gs_max_db", "Gs_min_db"},
                    {&logw, &g_hi, &g_lo, &gs_hi, &gs_lo});
  write_svg_plot(out / "synth_sv.svg", "Singular values: plant and shaped plant", "dB", logw,
                 {{"G max", &g_hi}, {"G min", &g_lo}, {"Gs max", &gs_hi}, {"Gs min", &gs_lo}},
                 "log10 omega (rad/s)");
  res.files = {"synth_sv.csv", "synth_sv.svg"};
  return res;
}

CommandResult cmd_margins(const AppConfig& cfg, const fs::path&) {
  CommandResult res;
  const Design d = build_design(cfg);
  const MarginReport m = design_margins(d.plant, d.k);
  const char* inputs[] = {"da", "dT"};
  for (std::size_t i = 0; i < m.inputs.size(); ++i) add_margin(res.report, std::string("input.") + inputs[i], m.inputs[i]);
  for (std::size_t i = 0; i < m.outputs.size(); ++i) add_margin(res.report, std::string("output.") + kStateNames[i], m.outputs[i]);
  add_margin(res.report, "multiloop.input", m.multiloop_input);
  add_margin(res.report, "multiloop.output", m.multiloop_output);
  return res;
}

CommandResult cmd_sim(const AppConfig& cfg, const fs::path& out) {
  CommandResult res;
  const Design d = build_design(cfg);
  const MappingParams map = config_mapping(cfg);
  const SimTrace tr = simulate_closed_loop(d.plant, d.controller, map, cfg.sim);
  write_trace_csv(out / "sim.csv", tr);
  res.files.push_back("sim.csv");
  plot_states(out, "sim_states.svg", "Closed-loop response, 1 deg pilot steps", tr, res);
  write_svg_plot(out / "sim_aileron.svg", "Aileron deflection", "deg", tr.time,
                 {{"commanded", &tr.da_cmd}, {"delivered", &tr.da}});
  write_svg_plot(out / "sim_thrust.svg", "Differential thrust", "lbf", tr.time,
                 {{"commanded", &tr.dT_cmd}, {"delivered", &tr.dT}});
  res.files.insert(res.files.end(), {"sim_aileron.svg", "sim_thrust.svg"});

  Report& rep = res.report;
  rep.add("settled", tr.settled);
  rep.add("settling_time_s", tr.settled ? tr.settling_time : std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < 4; ++s) {
    rep.add(std::string("settling_time.") + kStateNames[s],
            tr.state_settling[s].value_or(std::numeric_limits<double>::infinity()));
  }
  rep.add("max_abs_da_deg", peak_abs(tr.da));
  rep.add("max_abs_dT_lbf", peak_abs(tr.dT));
  rep.add("steady_dT_lbf", window_mean(tr.time, tr.dT, cfg.sim.settle_window));
  rep.add("rate_limit_hits", tr.rate_limit_hits);
  long violations = 0;
  for (std::size_t i = 0; i < tr.time.size(); ++i) {
    if (std::abs(tr.da[i]) > cfg.sim.aileron_limit_deg + 1e-9) ++violations;
    if (std::abs(tr.dT[i]) > map.saturation + 1e-6) ++violations;
    if (i > 0 && std::abs(tr.dT[i] - tr.dT[i - 1]) > map.rate_limit * (tr.time[i] - tr.time[i - 1]) * (1 + 1e-9) + 1e-9)
      ++violations;
  }
  rep.add("limit_violations", static_cast<long long>(violations));
  return res;
}

CommandResult cmd_monte(const AppConfig& cfg, const fs::path& out) {
  CommandResult res;
  const Design d = build_design(cfg);
  const MappingParams map = config_mapping(cfg);
  UncertaintySpec spec = cfg.monte;
  if (cfg.reference_gain) {
    spec.reference_gain = *cfg.reference_gain;
    spec.reference_frequency = 0.0;
  } else {
    const ReferenceGain ref = crossover_reference_gain(d.plant, d.k);
    spec.reference_gain = ref.gain;
    spec.reference_frequency = ref.omega;
  }
  const MonteCarloReport mc = run_campaign(d.plant, d.controller, map, spec, cfg.sim, cfg.threads);

  Report& rep = res.report;
  rep.add("runs", spec.count);
  rep.add("seed", static_cast<long long>(spec.seed));
  rep.add("level", spec.level);
  rep.add("structure", spec.structure);
  rep.add("reference_gain", spec.reference_gain);
  rep.add("reference_frequency", spec.reference_frequency);
  rep.add("stable_fraction", mc.stable_fraction);
  auto summary = [&](const std::string& name, const MetricSummary& s) {
    rep.add(name + ".min", s.min);
    rep.add(name + ".mean", s.mean);
    rep.add(name + ".max", s.max);
  };
  summary("settling_time_s", mc.settling);
  summary("peak_da_deg", mc.peak_da);
  summary("peak_dT_lbf", mc.peak_dT);
  summary("steady_dT_lbf", mc.steady_dT);
  double ss_low = std::numeric_limits<double>::infinity(), ss_high = -ss_low;
  for (const RunResult& r : mc.runs) {
    if (!r.stable) continue;
    ss_low = std::min(ss_low, r.steady_dT_low);
    ss_high = std::max(ss_high, r.steady_dT_high);
  }
  rep.add("steady_dT_window.low", ss_low);
  rep.add("steady_dT_window.high", ss_high);
  rep.add("rate_limit_hit_runs", mc.rate_limit_hit_runs);
  rep.add("rate_limit_hits", static_cast<long long>(mc.rate_limit_hits));
  const std::vector<int> ranked = worst_case_summary(mc);
  std::string worst;
  for (std::size_t i = 0; i < std::min<std::size_t>(10, ranked.size()); ++i) worst += (i ? "," : "") + std::to_string(ranked[i]);
  rep.add("worst_runs", worst);

  std::string csv = "run,stable,settling_time_s,peak_da_deg,peak_dT_lbf,steady_dT_lbf,delta_norm,rate_limit_hits\n";
  for (const RunResult& r : mc.runs) {
    csv += std::to_string(r.index) + "," + (r.stable ? "1" : "0") + "," + format_number(r.settling_time) + "," +
           format_number(r.peak_da) + "," + format_number(r.peak_dT) + "," + format_number(r.steady_dT) + "," +
           format_number(r.delta_norm) + "," + std::to_string(r.rate_limit_hits) + "\n";
  }
  write_text(out / "monte_runs.csv", csv);
  res.files.push_back("monte_runs.csv");

  // Overlay of the first runs for the envelope plots.
  const int shown = std::min(spec.count, 20);
  std::vector<SimTrace> traces;
  for (int i = 0; i < shown; ++i) {
    const Matrix delta = sample_perturbation(spec, i);
    try {
      traces.push_back(simulate_closed_loop(d.plant, d.controller, map, cfg.sim, &delta));
    } catch (const NumericalError&) {
    }
  }
  if (!traces.empty()) {
    std::vector<PlotSeries> phi, beta, thrust;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < traces.size(); ++i) names.push_back("run " + std::to_string(i));
    for (std::size_t i = 0; i < traces.size(); ++i) {
      phi.push_back({names[i], &traces[i].phi});
      beta.push_back({names[i], &traces[i].beta});
      thrust.push_back({names[i], &traces[i].dT});
    }
    write_svg_plot(out / "monte_phi.svg", "Perturbed runs: roll angle", "phi (deg)", traces[0].time, phi);
    write_svg_plot(out / "monte_beta.svg", "Perturbed runs: sideslip", "beta (deg)", traces[0].time, beta);
    write_svg_plot(out / "monte_thrust.svg", "Perturbed runs: differential thrust", "dT (lbf)", traces[0].time, thrust);
    res.files.insert(res.files.end(), {"monte_phi.svg", "monte_beta.svg", "monte_thrust.svg"});
  }
  return res;
}

int run_command(const std::string& name, const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  auto fail = [&](int code, const char* kind, const std::string& msg) {
    err << "error code=" << code << " kind=" << kind << " command=" << name << " message=" << quoted(msg) << "\n";
    return code;
  };
  using Fn = CommandResult (*)(const AppConfig&, const fs::path&);
  static const std::vector<std::pair<std::string, Fn>> table{
      {"model", cmd_model}, {"modes", cmd_modes},     {"engine", cmd_engine}, {"map", cmd_map},
      {"openloop", cmd_openloop}, {"synth", cmd_synth}, {"margins", cmd_margins}, {"sim", cmd_sim},
      {"monte", cmd_monte}};
  const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == name; });
  if (it == table.end()) return fail(2, "usage", "unknown subcommand");

  const std::string started = utc_now();
  std::string raw = "{}";
  AppConfig cfg;
  try {
    cfg = opt.config.empty() ? parse_config(raw) : load_config(opt.config, &raw);
    apply_overrides(cfg, opt);
  } catch (const ConfigError& e) {
    return fail(2, "config", e.what());
  }

  CommandResult res;
  try {
    fs::create_directories(opt.out);
    res = it->second(cfg, opt.out);
  } catch (const ConfigError& e) {
    return fail(2, "config", e.what());
  } catch (const NumericalError& e) {
    return fail(3, "numerical", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(2, "config", e.what());
  } catch (const std::exception& e) {
    return fail(1, "io", e.what());
  }

  try {
    const std::string report_file = name + "_report.txt";
    write_text(opt.out / report_file, res.report.str());
    res.files.insert(res.files.begin(), report_file);
    Report manifest;
    manifest.add("tool_version", kToolVersion);
    manifest.add("subcommand", name);
    manifest.add("config_digest", sha256_hex(raw));
    manifest.add("seed", static_cast<long long>(cfg.monte.seed));
    manifest.add("started_utc", started);
    manifest.add("finished_utc", utc_now());
    std::string files;
    for (std::size_t i = 0; i < res.files.size(); ++i) files += (i ? "," : "") + res.files[i];
    manifest.add("outputs", files);
    write_text(opt.out / (name + "_manifest.txt"), manifest.str());
  } catch (const std::exception& e) {
    return fail(1, "io", e.what());
  }
  out << res.report.str();
  return 0;
}

}  // namespace vrudder
