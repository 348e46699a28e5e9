#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace singlap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  /// Short machine-readable tag used in CLI error documents.
  virtual const char* kind() const noexcept { return "error"; }
};

class InvalidMesh : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_mesh"; }
};

/// Bad argument value or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_argument"; }
};

/// Argument outside the mathematical domain of an operation (s <= 0 for f, lambda < lambda_star, ...).
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain_error"; }
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double last_residual, std::size_t iterations)
      : Error(what), last_residual_(last_residual), iterations_(iterations) {}
  const char* kind() const noexcept override { return "solver_failure"; }
  double last_residual() const noexcept { return last_residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  std::size_t iterations_;
};

class ThresholdNotFound : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "threshold_not_found"; }
};

/// One of the psi sandwich bounds failed; `node` is the first violating node.
class BarrierConstructionError : public Error {
 public:
  BarrierConstructionError(const std::string& what, std::size_t node, double violation)
      : Error(what), node_(node), violation_(violation) {}
  const char* kind() const noexcept override { return "barrier_construction"; }
  std::size_t node() const noexcept { return node_; }
  double violation() const noexcept { return violation_; }

 private:
  std::size_t node_;
  double violation_;
};

/// Bisection endpoints do not bracket a solvability transition.
class NoDichotomy : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "no_dichotomy"; }
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
  const char* kind() const noexcept override { return "config_error"; }
  /// 1-based line number, 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace singlap
