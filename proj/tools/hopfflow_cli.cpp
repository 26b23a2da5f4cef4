#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hopfflow/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Windowed energy audit of heat-coupled slip flow with inflow and outflow"};
  app.require_subcommand(1);
  hopfflow::RunOptions opt;
  std::string file, axis;
  std::vector<std::string> values;

  auto* run = app.add_subcommand("run", "integrate a scenario and write the time series and certificates");
  run->add_option("file", file, "scenario file")->required();
  run->add_option("--out", opt.out_dir, "output directory");
  run->add_option("--snapshots", opt.snapshots, "snapshot cadence in recorded samples (0 disables)");
  run->add_flag("--strict", opt.strict, "exit 3 when a certificate fails");

  auto* check = app.add_subcommand("check", "static validation without time integration");
  check->add_option("file", file, "scenario file")->required();

  auto* sweep = app.add_subcommand("sweep", "repeat run over one scenario key");
  sweep->add_option("file", file, "scenario file")->required();
  sweep->add_option("--axis", axis, "scenario key, for example flux.amplitude")->required();
  sweep->add_option("--values", values, "comma separated values")->delimiter(',')->required();
  sweep->add_option("--out", opt.out_dir, "output directory");
  sweep->add_option("--snapshots", opt.snapshots, "snapshot cadence in recorded samples (0 disables)");
  sweep->add_flag("--strict", opt.strict, "exit 3 when a run fails a certificate or is flagged");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hopfflow::kExitConfig;
  }
  if (*run) return hopfflow::cmd_run(file, opt, std::cout, std::cerr);
  if (*check) return hopfflow::cmd_check(file, std::cout, std::cerr);
  return hopfflow::cmd_sweep(file, axis, values, opt, std::cout, std::cerr);
}
