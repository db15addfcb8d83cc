#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>
#include <unistd.h>

#include "vrudder/cli.hpp"

using namespace vrudder;
namespace fs = std::filesystem;

namespace {

const fs::path kDefault = fs::path(VRUDDER_SOURCE_DIR) / "configs" / "default.json";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vrudder_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch("configs") / name;
  std::ofstream(p) << text;
  return p;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::string& cmd, CommandOptions opt) {
  std::ostringstream out, err;
  const int code = run_command(cmd, opt, out, err);
  return {code, out.str(), err.str()};
}

CommandOptions options(const std::string& dir, fs::path config = kDefault) {
  CommandOptions o;
  o.config = std::move(config);
  o.out = scratch(dir);
  return o;
}

std::string value(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  }
  return {};
}

}  // namespace

TEST_CASE("bundled config matches the built-in defaults") {
  const AppConfig file = load_config(kDefault);
  const AppConfig builtin = parse_config("{}");
  CHECK(file.derivatives == builtin.derivatives);
  CHECK(file.inertia_damaged.Ixz == builtin.inertia_damaged.Ixz);
  CHECK(file.engine.saturation == 43729.0);
  CHECK(file.sim.dt == 0.01);
  CHECK(file.monte.count == 1000);
  CHECK(file.monte.level == 0.30);
  CHECK(file.command_channels == std::vector<int>{0, 3});
  CHECK_FALSE(file.k_map.has_value());
  const StateSpace a = config_plant(file);
  const StateSpace b = golden_plant();
  CHECK(a.a() == b.a());
}

TEST_CASE("assembled plant with pinned entries equals the golden plant") {
  AppConfig c = parse_config(R"({"plant": {"source": "assembled", "pin_published": true}})");
  CHECK(config_plant(c).a() == golden_plant().a());
  CHECK(config_plant(c).b() == golden_plant().b());
  c.pin_published = false;
  CHECK(config_plant(c).a() != golden_plant().a());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config(""), ConfigError);
  CHECK_THROWS_AS(parse_config("[1,2]"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"engine": {"tau": "slow"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"engine": {"tau": -1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"engine": {"taux": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"extra": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"plant": {"source": "wind tunnel"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"simulation": {"integrator": "euler"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"weights": {"w1": [{"num": [1], "den": [1, 1]}]}})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  CHECK_NOTHROW(parse_config(R"({"mapping": {"k_map": 443000}})"));
}

TEST_CASE("digest") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex(slurp(kDefault)) == sha256_hex(slurp(kDefault)));
}

TEST_CASE("report formatting") {
  Report r;
  r.add("a", 0.25);
  r.add("b", 3);
  r.add("c", true);
  r.add("d", "text");
  r.add("e", std::numeric_limits<double>::infinity());
  CHECK(r.str() == "a=0.25\nb=3\nc=true\nd=text\ne=inf\n");
  CHECK(*r.find("d") == "text");
  CHECK_FALSE(r.find("z").has_value());
}

TEST_CASE("flag overrides") {
  AppConfig c = parse_config("{}");
  CommandOptions o;
  o.seed = 9;
  o.runs = 12;
  o.uncertainty = 0.1;
  o.dt = 0.02;
  o.duration = 30.0;
  apply_overrides(c, o);
  CHECK(c.monte.seed == 9);
  CHECK(c.monte.count == 12);
  CHECK(c.monte.level == 0.1);
  CHECK(c.sim.dt == 0.02);
  CHECK(c.sim.duration == 30.0);
  o.uncertainty = 2.0;
  CHECK_THROWS_AS(apply_overrides(c, o), ConfigError);
}

TEST_CASE("modes subcommand") {
  const CommandOptions o = options("modes");
  const Outcome r = run("modes", o);
  REQUIRE(r.code == 0);
  CHECK(std::abs(std::stod(value(r.out, "mode.dutch_roll.damping")) + 0.209) < 0.01);
  CHECK(fs::exists(o.out / "modes_report.txt"));
  CHECK(fs::exists(o.out / "modes_manifest.txt"));
  const std::string manifest = slurp(o.out / "modes_manifest.txt");
  CHECK(value(manifest, "config_digest") == sha256_hex(slurp(kDefault)));
  CHECK(value(manifest, "subcommand") == "modes");
  CHECK(value(manifest, "tool_version") == kToolVersion);
  CHECK(value(manifest, "outputs").find("modes.csv") != std::string::npos);
}

TEST_CASE("synth subcommand") {
  const Outcome r = run("synth", options("synth"));
  REQUIRE(r.code == 0);
  CHECK(std::abs(std::stod(value(r.out, "e_max")) - 0.2763) < 0.01);
  CHECK(value(r.out, "closed_loop_stable") == "true");
}

TEST_CASE("sim subcommand writes the fixed trace schema deterministically") {
  CommandOptions a = options("sim_a");
  CommandOptions b = options("sim_b");
  a.duration = b.duration = 20.0;
  REQUIRE(run("sim", a).code == 0);
  REQUIRE(run("sim", b).code == 0);
  const std::string csv = slurp(a.out / "sim.csv");
  CHECK(csv.substr(0, csv.find('\n')) == "t,phi_deg,p_dps,beta_deg,r_dps,da_cmd_deg,da_deg,dT_cmd_lbf,dT_lbf");
  CHECK(csv == slurp(b.out / "sim.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2002);
  CHECK(slurp(a.out / "sim_states.svg").rfind("<svg", 0) == 0);
  CHECK(slurp(a.out / "sim_report.txt") == slurp(b.out / "sim_report.txt"));
}

TEST_CASE("remaining subcommands succeed") {
  for (const std::string cmd : {"model", "engine", "map", "openloop", "margins"}) {
    CAPTURE(cmd);
    const CommandOptions o = options(cmd);
    const Outcome r = run(cmd, o);
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    CHECK(fs::exists(o.out / (cmd + "_report.txt")));
  }
  CHECK(value(run("openloop", options("ol")).out, "diverged.all") == "true");
  CHECK(std::abs(std::stod(value(run("map", options("map2")).out, "thrust_per_deg_lbf")) - 7737.0) < 77.37);
}

TEST_CASE("monte subcommand is reproducible") {
  CommandOptions a = options("mc_a");
  CommandOptions b = options("mc_b");
  a.runs = b.runs = 25;
  a.seed = b.seed = 77;
  REQUIRE(run("monte", a).code == 0);
  REQUIRE(run("monte", b).code == 0);
  CHECK(slurp(a.out / "monte_report.txt") == slurp(b.out / "monte_report.txt"));
  CHECK(slurp(a.out / "monte_runs.csv") == slurp(b.out / "monte_runs.csv"));
  CHECK(value(slurp(a.out / "monte_report.txt"), "runs") == "25");
}

TEST_CASE("exit codes") {
  const Outcome empty = run("sim", options("e1", write_config("empty.json", "")));
  CHECK(empty.code == 2);
  CHECK(empty.err.rfind("error code=2 kind=config", 0) == 0);
  CHECK(std::count(empty.err.begin(), empty.err.end(), '\n') == 1);

  CHECK(run("sim", options("e2", write_config("bad.json", R"({"simulation": {"dt": -1}})"))).code == 2);
  CHECK(run("bogus", options("e3")).code == 2);

  const Outcome numeric = run("sim", options("e4", write_config("guard.json", R"({"simulation": {"guard": 1e-9}})")));
  CHECK(numeric.code == 3);
  CHECK(numeric.err.rfind("error code=3 kind=numerical", 0) == 0);
}
