#pragma once

// Config ingestion, artifact emission and the subcommand pipeline.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vrudder/airframe.hpp"
#include "vrudder/engine.hpp"
#include "vrudder/robustness.hpp"
#include "vrudder/sim.hpp"
#include "vrudder/synthesis.hpp"
#include "vrudder/thrustmap.hpp"

namespace vrudder {

inline constexpr const char* kToolVersion = "1.0.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EngineDemo {
  double command = 46500.0;  // lbf, absolute throttle target
  double duration = 20.0;
  double dt = 0.01;
};

struct MapDemo {
  double rudder_deg = 1.0;
  double duration = 20.0;
  double dt = 0.01;
};

struct AppConfig {
  FlightCondition flight;
  GeometryConfig geometry;
  InertiaConfig inertia_nominal;
  InertiaConfig inertia_damaged;
  DerivativeSet derivatives;
  TrimState trim;
  std::string plant_source = "golden";  // "golden" or "assembled"
  bool pin_published = true;            // assembled only
  EngineParams engine;
  std::optional<double> k_map;          // derived from the airframe when absent
  LoopShapingWeights weights = build_weights();
  double gamma_backoff = 1.05;
  double minimal_tol = 1e-8;
  std::vector<int> command_channels{0, 3};
  SimConfig sim;
  double openloop_duration = 100.0;
  UncertaintySpec monte;
  std::optional<double> reference_gain;  // plant gain the level scales; crossover gain when absent
  unsigned threads = 0;
  EngineDemo engine_demo;
  MapDemo map_demo;
};

/// Parses the JSON config; every section is optional and defaults to the
/// published data. Throws ConfigError on malformed or invalid input.
[[nodiscard]] AppConfig parse_config(const std::string& text);
[[nodiscard]] AppConfig load_config(const std::filesystem::path& path, std::string* raw = nullptr);

/// Lower-case hex SHA-256.
[[nodiscard]] std::string sha256_hex(const std::string& bytes);

// --- outputs ---------------------------------------------------------------

/// Ordered key=value records.
class Report {
 public:
  void add(const std::string& key, double value);
  void add(const std::string& key, long long value);
  void add(const std::string& key, int value) { add(key, static_cast<long long>(value)); }
  void add(const std::string& key, bool value);
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }

  [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  [[nodiscard]] std::optional<std::string> find(const std::string& key) const;
  [[nodiscard]] std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

[[nodiscard]] std::string format_number(double v);

inline constexpr const char* kTraceHeader = "t,phi_deg,p_dps,beta_deg,r_dps,da_cmd_deg,da_deg,dT_cmd_lbf,dT_lbf";

void write_trace_csv(const std::filesystem::path& path, const SimTrace& trace);
void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                       const std::vector<const std::vector<double>*>& columns);

struct PlotSeries {
  std::string name;
  const std::vector<double>* y;
};

void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& y_label,
                    const std::vector<double>& x, const std::vector<PlotSeries>& series,
                    const std::string& x_label = "t (s)");

void write_text(const std::filesystem::path& path, const std::string& text);

// --- commands --------------------------------------------------------------

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<double> uncertainty;
  std::optional<double> dt;
  std::optional<double> duration;
};

struct CommandResult {
  Report report;
  std::vector<std::string> files;  // relative to the output directory
};

[[nodiscard]] const std::vector<std::string>& command_names();

/// Flag overrides applied on top of a parsed config.
void apply_overrides(AppConfig& cfg, const CommandOptions& opt);

/// Plant selected by the config (golden or assembled) and the mapping.
[[nodiscard]] StateSpace config_plant(const AppConfig& cfg);
[[nodiscard]] MappingParams config_mapping(const AppConfig& cfg);

CommandResult cmd_model(const AppConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_modes(const AppConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_engine(const AppConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_map(const AppConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_openloop(const AppConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_synth(const AppConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_margins(const AppConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_sim(const AppConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_monte(const AppConfig& cfg, const std::filesystem::path& out);

/// Loads the config, runs one subcommand, writes its report and manifest.
/// Returns 0, 2 (config error) or 3 (numerical failure); errors go to `err`
/// as one `error ...` line.
int run_command(const std::string& name, const CommandOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace vrudder
