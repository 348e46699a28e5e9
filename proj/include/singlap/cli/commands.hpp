#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "singlap/cli/artifacts.hpp"
#include "singlap/cli/config.hpp"
#include "singlap/continuum.hpp"

namespace singlap::cli {

enum class ExitCode : int {
  Ok = 0,
  Config = 1,        ///< malformed or inconsistent configuration
  Precondition = 2,  ///< well-formed input that violates a precondition
  NoDichotomy = 3,   ///< threshold bracket shows no solvability transition
  Failure = 4,       ///< solver or verification failure
};

struct CommandOptions {
  std::string command;  ///< solve | sweep | threshold | eigen | verify
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::size_t jobs = 1;
  bool exploratory = false;
  std::optional<std::uint64_t> seed;
};

/// Runs one command and writes its artifacts plus run.json. Failures are reported as a
/// JSON error document on `err` (and in error.json when the output directory is known).
int run_command(const CommandOptions& opts, std::ostream& log, std::ostream& err);

ExitCode exit_code_for(const std::exception& e) noexcept;

ProblemSpec problem_from_config(const RunConfig& cfg);

/// Grid values in absolute units.
std::vector<double> lambda_grid(const LambdaConfig& cfg, double lambda_star);

/// The invariant suites behind `verify`; deterministic for a fixed seed.
Json verify_report(const RunConfig& cfg);

}  // namespace singlap::cli
