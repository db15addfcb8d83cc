#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "vrudder/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Virtual-rudder flight control toolkit"};
  app.set_version_flag("--version", vrudder::kToolVersion);
  app.require_subcommand(1);

  vrudder::CommandOptions opt;
  std::string config, out = "out";
  const std::map<std::string, std::string> about{
      {"model", "plant matrices and entries recomputed from the tabulated data"},
      {"modes", "damaged-aircraft modes: poles, damping, period"},
      {"engine", "engine thrust step trace"},
      {"map", "rudder-equivalent differential thrust trace"},
      {"openloop", "uncontrolled response to 1 deg steps"},
      {"synth", "loop-shaping synthesis summary and singular values"},
      {"margins", "disk margins per channel and multiloop"},
      {"sim", "constrained closed-loop response"},
      {"monte", "seeded Monte-Carlo campaign under additive uncertainty"}};
  for (const std::string& name : vrudder::command_names()) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config, "JSON configuration file (defaults built in)");
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "Monte-Carlo seed");
    sub->add_option("--runs", opt.runs, "Monte-Carlo run count");
    sub->add_option("--uncertainty", opt.uncertainty, "uncertainty level, fraction of reference gain");
    sub->add_option("--dt", opt.dt, "simulation step, s");
    sub->add_option("--duration", opt.duration, "simulation horizon, s");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error code=2 kind=usage message=\"" << e.what() << "\"\n";
    return 2;
  }
  opt.config = config;
  opt.out = out;
  return vrudder::run_command(app.get_subcommands().front()->get_name(), opt, std::cout, std::cerr);
}
