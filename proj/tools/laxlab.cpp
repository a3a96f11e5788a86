#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "laxlab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"laxlab: integrable many-body systems, their linearizing coordinates and checks"};
  app.require_subcommand(1);

  laxlab::CliOptions opts;
  std::string out_dir;
  app.add_option("--out-dir", out_dir, "Directory for output files (default: $LAXLAB_OUT_DIR or .)");
  app.add_flag("--quiet", opts.quiet, "Only print errors");

  std::string config;
  auto* run = app.add_subcommand("run", "Integrate the equations of motion; write CSV trajectory and JSON report");
  run->add_option("config", config, "Run configuration (JSON)")->required();

  auto* verify = app.add_subcommand("verify", "Run the checks listed in the configuration");
  verify->add_option("config", config, "Run configuration (JSON)")->required();

  std::vector<double> times;
  bool oracle = false;
  auto* solve = app.add_subcommand("solve", "Closed-form positions and G at the given times");
  solve->add_option("config", config, "Run configuration (JSON)")->required();
  solve->add_option("--times", times, "Comma-separated times")->delimiter(',')->required();
  solve->add_flag("--verify-against-oracle", oracle, "Compare against the integrated trajectory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : laxlab::kExitConfig;
  }
  if (!out_dir.empty()) opts.out_dir = out_dir;

  if (*run) return laxlab::cmd_run(config, opts, std::cout, std::cerr);
  if (*verify) return laxlab::cmd_verify(config, opts, std::cout, std::cerr);
  return laxlab::cmd_solve(config, times, oracle, opts, std::cout, std::cerr);
}
