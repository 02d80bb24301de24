#include <iostream>

#include <CLI11.hpp>

#include "spm/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Shrinking projection runs and invariant checks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the iteration described by a JSON config");
  std::string config_path;
  std::string out_path;
  spm::Format format = spm::Format::csv;
  run->add_option("--config", config_path, "JSON config")->required();
  run->add_option("--out", out_path, "Trace output path")->required();
  run->add_option("--format", format, "csv or json")
      ->transform(CLI::CheckedTransformer(std::map<std::string, spm::Format>{{"csv", spm::Format::csv}, {"json", spm::Format::json}}));

  auto* check = app.add_subcommand("check", "Randomized invariant checks for one module");
  std::string suite;
  spm::CheckOptions options;
  check->add_option("--suite", suite, "space, convex, equilibrium, mappings or algorithm")->required();
  check->add_option("--seed", options.seed, "Base seed");
  check->add_option("--samples", options.samples, "Instances per check");
  check->add_flag("--broken-fixture", options.broken_fixture, "Include the beta = 1.2 segment map");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (run->parsed()) return spm::cmd_run(config_path, out_path, format, std::cerr);
  return spm::cmd_check(suite, options, std::cout, std::cerr);
}
