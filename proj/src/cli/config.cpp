#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "vrudder/cli.hpp"

namespace vrudder {
namespace {

using nlohmann::json;

// Object view that rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("section '" + name_ + "' must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  void get(const std::string& key, double& dst) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    dst = v.get<double>();
  }
  void get(const std::string& key, int& dst) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + " must be an integer");
    dst = v.get<int>();
  }
  void get(const std::string& key, unsigned& dst) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(where(key) + " must be a nonnegative integer");
    dst = v.get<unsigned>();
  }
  void get(const std::string& key, std::uint64_t& dst) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(where(key) + " must be a nonnegative integer");
    dst = v.get<std::uint64_t>();
  }
  void get(const std::string& key, bool& dst) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + " must be true or false");
    dst = v.get<bool>();
  }
  void get(const std::string& key, std::string& dst) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
    dst = v.get<std::string>();
  }
  void get(const std::string& key, std::optional<double>& dst) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (v.is_null()) {
      dst.reset();
      return;
    }
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number or null");
    dst = v.get<double>();
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }
  [[nodiscard]] std::string where(const std::string& key) const { return name_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + where(key) + "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

Polynomial read_poly(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + " must be a nonempty array of numbers");
  Polynomial p;
  for (const json& c : j) {
    if (!c.is_number()) throw ConfigError(where + " must be a nonempty array of numbers");
    p.push_back(c.get<double>());
  }
  return p;
}

TransferMatrix read_diagonal(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + " must be a nonempty array of channels");
  std::vector<Rational> channels;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    Section s(j[i], w);
    if (!s.has("num") || !s.has("den")) throw ConfigError(w + " needs num and den");
    channels.push_back({read_poly(s.raw("num"), w + ".num"), read_poly(s.raw("den"), w + ".den")});
    s.finish();
  }
  return TransferMatrix::diagonal(channels);
}

void read_flight(Section s, FlightCondition& f) {
  s.get("altitude_ft", f.altitude_ft);
  s.get("rho", f.rho);
  s.get("airspeed", f.airspeed);
  s.get("mach", f.mach);
  s.get("g", f.g);
  s.finish();
}

void read_geometry(Section s, GeometryConfig& g) {
  s.get("S", g.S);
  s.get("b", g.b);
  s.get("cbar", g.cbar);
  s.get("y_e", g.y_e);
  if (s.has("tail")) {
    Section t(s.raw("tail"), s.where("tail"));
    TailGeometry tail;
    t.get("S_v", tail.S_v);
    t.get("l_v", tail.l_v);
    t.get("z_v", tail.z_v);
    t.get("V_v", tail.V_v);
    t.get("eta", tail.eta);
    t.get("eta_v", tail.eta_v);
    t.get("dsigma_dbeta", tail.dsigma_dbeta);
    t.get("CLalpha_v", tail.CLalpha_v);
    t.finish();
    g.tail = tail;
  }
  s.finish();
}

void read_inertia(Section s, InertiaConfig& i) {
  s.get("W", i.W);
  s.get("m", i.m);
  s.get("Ixx", i.Ixx);
  s.get("Iyy", i.Iyy);
  s.get("Izz", i.Izz);
  s.get("Ixz", i.Ixz);
  s.finish();
}

void read_derivatives(Section s, DerivativeSet& d) {
  s.get("CL_beta", d.CL_beta);
  s.get("CL_p", d.CL_p);
  s.get("CL_r", d.CL_r);
  s.get("CL_da", d.CL_da);
  s.get("CL_dr", d.CL_dr);
  s.get("CN_beta", d.CN_beta);
  s.get("CN_p", d.CN_p);
  s.get("CN_r", d.CN_r);
  s.get("CN_da", d.CN_da);
  s.get("CN_dr", d.CN_dr);
  s.get("CY_beta", d.CY_beta);
  s.get("CY_p", d.CY_p);
  s.get("CY_r", d.CY_r);
  s.get("CY_da", d.CY_da);
  s.get("CY_dr", d.CY_dr);
  s.get("CL_trim", d.CL_trim);
  s.finish();
}

void read_engine(Section s, EngineParams& e) {
  s.get("tau", e.tau);
  s.get("zeta", e.zeta);
  s.get("t_d", e.t_d);
  s.get("T_max", e.T_max);
  s.get("T_trim", e.T_trim);
  s.get("rate_limit", e.rate_limit);
  s.get("saturation", e.saturation);
  s.finish();
}

void read_simulation(Section s, AppConfig& c) {
  SimConfig& m = c.sim;
  s.get("dt", m.dt);
  s.get("duration", m.duration);
  s.get("aileron_deg", m.pilot.aileron_deg);
  s.get("rudder_deg", m.pilot.rudder_deg);
  s.get("start", m.pilot.start);
  s.get("aileron_limit_deg", m.aileron_limit_deg);
  s.get("aileron_rate_limit_dps", m.aileron_rate_limit_dps);
  s.get("apply_limits", m.apply_limits);
  s.get("engine_lag", m.engine_lag);
  s.get("settle_band", m.settle_band);
  s.get("settle_window", m.settle_window);
  s.get("guard", m.guard);
  std::string integrator = "rk4";
  s.get("integrator", integrator);
  if (integrator != "rk4") throw ConfigError("simulation.integrator: only \"rk4\" is supported");
  s.get("openloop_duration", c.openloop_duration);
  s.finish();
}

template <typename F>
void with_section(const json& root, std::set<std::string>& seen, const std::string& name, F&& f) {
  seen.insert(name);
  if (root.contains(name)) f(Section(root.at(name), name));
}

template <typename T>
void check(const T& value, const char* what) {
  try {
    value.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

AppConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");

  AppConfig c;
  std::set<std::string> seen;
  with_section(root, seen, "flight_condition", [&](Section s) { read_flight(std::move(s), c.flight); });
  with_section(root, seen, "geometry", [&](Section s) { read_geometry(std::move(s), c.geometry); });
  c.inertia_nominal = nominal_inertia();
  c.inertia_damaged = damaged_inertia();
  c.derivatives = nominal_derivatives();
  with_section(root, seen, "inertia_nominal", [&](Section s) { read_inertia(std::move(s), c.inertia_nominal); });
  with_section(root, seen, "inertia_damaged", [&](Section s) { read_inertia(std::move(s), c.inertia_damaged); });
  with_section(root, seen, "derivatives_nominal", [&](Section s) { read_derivatives(std::move(s), c.derivatives); });
  with_section(root, seen, "trim", [&](Section s) {
    s.get("theta", c.trim.theta);
    s.get("gamma", c.trim.gamma);
    s.get("beta", c.trim.beta);
    s.get("engine_thrust", c.trim.engine_thrust);
    s.finish();
  });
  with_section(root, seen, "plant", [&](Section s) {
    s.get("source", c.plant_source);
    s.get("pin_published", c.pin_published);
    s.finish();
  });
  with_section(root, seen, "engine", [&](Section s) { read_engine(std::move(s), c.engine); });
  with_section(root, seen, "mapping", [&](Section s) {
    s.get("k_map", c.k_map);
    s.finish();
  });
  with_section(root, seen, "weights", [&](Section s) {
    if (s.has("w1")) c.weights.w1 = read_diagonal(s.raw("w1"), "weights.w1");
    if (s.has("w2")) c.weights.w2 = read_diagonal(s.raw("w2"), "weights.w2");
    s.finish();
  });
  with_section(root, seen, "synthesis", [&](Section s) {
    s.get("gamma_backoff", c.gamma_backoff);
    s.get("minimal_tol", c.minimal_tol);
    if (s.has("command_channels")) {
      const json& ch = s.raw("command_channels");
      if (!ch.is_array() || ch.size() != 2) throw ConfigError("synthesis.command_channels must list two outputs");
      c.command_channels.clear();
      for (const json& v : ch) {
        if (!v.is_number_integer()) throw ConfigError("synthesis.command_channels must be integers");
        c.command_channels.push_back(v.get<int>());
      }
    }
    s.finish();
  });
  with_section(root, seen, "simulation", [&](Section s) { read_simulation(std::move(s), c); });
  with_section(root, seen, "monte_carlo", [&](Section s) {
    s.get("level", c.monte.level);
    s.get("structure", c.monte.structure);
    s.get("runs", c.monte.count);
    s.get("seed", c.monte.seed);
    s.get("threads", c.threads);
    s.get("reference_gain", c.reference_gain);
    s.finish();
  });
  with_section(root, seen, "engine_demo", [&](Section s) {
    s.get("command", c.engine_demo.command);
    s.get("duration", c.engine_demo.duration);
    s.get("dt", c.engine_demo.dt);
    s.finish();
  });
  with_section(root, seen, "map_demo", [&](Section s) {
    s.get("rudder_deg", c.map_demo.rudder_deg);
    s.get("duration", c.map_demo.duration);
    s.get("dt", c.map_demo.dt);
    s.finish();
  });
  for (const auto& [key, value] : root.items()) {
    if (!seen.count(key)) throw ConfigError("unknown section '" + key + "'");
  }

  check(c.flight, "flight_condition");
  check(c.geometry, "geometry");
  check(c.inertia_nominal, "inertia_nominal");
  check(c.inertia_damaged, "inertia_damaged");
  check(c.derivatives, "derivatives_nominal");
  check(c.trim, "trim");
  check(c.engine, "engine");
  check(c.sim, "simulation");
  check(c.monte, "monte_carlo");
  if (c.plant_source != "golden" && c.plant_source != "assembled") {
    throw ConfigError("plant.source must be \"golden\" or \"assembled\"");
  }
  if (c.reference_gain && !(*c.reference_gain >= 0.0)) throw ConfigError("monte_carlo.reference_gain must be >= 0");
  if (c.k_map && !(*c.k_map > 0.0)) throw ConfigError("mapping.k_map must be positive");
  if (c.weights.w1.inputs() != 2 || c.weights.w1.outputs() != 2) throw ConfigError("weights.w1 must have 2 channels");
  if (c.weights.w2.inputs() != 4 || c.weights.w2.outputs() != 4) throw ConfigError("weights.w2 must have 4 channels");
  if (!(c.gamma_backoff >= 1.0)) throw ConfigError("synthesis.gamma_backoff must be at least 1");
  if (!(c.minimal_tol > 0.0)) throw ConfigError("synthesis.minimal_tol must be positive");
  for (int ch : c.command_channels) {
    if (ch < 0 || ch > 3) throw ConfigError("synthesis.command_channels entries must be in 0..3");
  }
  if (!(c.openloop_duration >= c.sim.dt)) throw ConfigError("simulation.openloop_duration must cover one step");
  if (!(c.engine_demo.dt > 0.0) || !(c.engine_demo.duration >= 0.0)) throw ConfigError("engine_demo: bad timing");
  if (!(c.engine_demo.command >= 0.0 && c.engine_demo.command <= c.engine.T_max)) {
    throw ConfigError("engine_demo.command must be within [0, T_max]");
  }
  if (!(c.map_demo.dt > 0.0) || !(c.map_demo.duration >= c.map_demo.dt)) throw ConfigError("map_demo: bad timing");
  return c;
}

AppConfig load_config(const std::filesystem::path& path, std::string* raw) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (raw) *raw = text;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ConfigError("config file is empty");
  return parse_config(text);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

}  // namespace vrudder
