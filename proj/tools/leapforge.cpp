#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "leapforge/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"leapforge: localized key establishment simulator"};
  app.require_subcommand(1);

  leapforge::RunOptions run_opts;
  std::uint64_t run_seed = 0;
  auto* run = app.add_subcommand("run", "Run one scenario and write trace, metrics and audit log");
  run->add_option("--config", run_opts.config, "Scenario TOML file")->required()->check(CLI::ExistingFile);
  auto* run_seed_opt = run->add_option("--seed", run_seed, "Override the scenario seed");
  run->add_option("--out", run_opts.out_dir, "Output directory (LEAPFORGE_OUT overrides)")
      ->capture_default_str();

  leapforge::SweepOptions sweep_opts;
  std::uint64_t sweep_seed = 0;
  auto* sweep = app.add_subcommand("sweep", "Repeat a scenario over several node counts");
  sweep->add_option("--config", sweep_opts.config, "Base scenario TOML file")
      ->required()
      ->check(CLI::ExistingFile);
  auto* sweep_seed_opt = sweep->add_option("--seed", sweep_seed, "Override the base seed");
  sweep->add_option("--out", sweep_opts.out_dir, "Output directory (LEAPFORGE_OUT overrides)")
      ->capture_default_str();
  sweep->add_option("--counts", sweep_opts.counts, "Comma-separated node counts")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--repeats", sweep_opts.repeats, "Runs per node count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* vectors = app.add_subcommand("verify-vectors", "Check the crypto primitives against known answers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : leapforge::kExitInvalidScenario;
  }

  if (*run) {
    if (*run_seed_opt) run_opts.seed = run_seed;
    return leapforge::run_command(run_opts, std::cout, std::cerr);
  }
  if (*sweep) {
    if (*sweep_seed_opt) sweep_opts.seed = sweep_seed;
    return leapforge::sweep_command(sweep_opts, std::cout, std::cerr);
  }
  if (*vectors) return leapforge::verify_vectors(std::cout);
  return leapforge::kExitFailure;
}
