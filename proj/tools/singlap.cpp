#include <iostream>

#include "CLI11.hpp"
#include "singlap/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Singular p-Laplacian Dirichlet problems: solve, sweep, threshold, eigen, verify"};
  singlap::cli::CommandOptions opts;
  std::string out;
  std::uint64_t seed = 0;
  app.add_option("command", opts.command, "solve | sweep | threshold | eigen | verify")
      ->required()
      ->check(CLI::IsMember({"solve", "sweep", "threshold", "eigen", "verify"}));
  app.add_option("--config", opts.config, "Run configuration (key = value file)")->required();
  auto* out_opt = app.add_option("--out", out, "Output directory (overrides the config 'output' key)");
  app.add_option("--jobs", opts.jobs, "Worker threads for cold-start sweeps")->check(CLI::PositiveNumber);
  app.add_flag("--exploratory", opts.exploratory, "Allow solves below lambda_star without barriers");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for the randomized verification suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(singlap::cli::ExitCode::Config);
  }
  if (*out_opt) opts.out = out;
  if (*seed_opt) opts.seed = seed;
  return singlap::cli::run_command(opts, std::cout, std::cerr);
}
