#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "singlap/grid.hpp"

namespace singlap::cli {

struct ConfigEntry {
  std::string value;
  std::size_t line = 0;
};

/// Flat `key = value` file. See docs/config.md for the exact grammar.
class ConfigFile {
 public:
  /// Throws ConfigError with the 1-based line of the first malformed line.
  static ConfigFile parse(std::string_view text, std::filesystem::path base_dir = {});
  static ConfigFile load(const std::filesystem::path& path);

  const ConfigEntry* find(const std::string& key) const;
  bool has(const std::string& key) const { return find(key) != nullptr; }
  const std::map<std::string, ConfigEntry>& entries() const noexcept { return entries_; }
  const std::filesystem::path& base_dir() const noexcept { return base_dir_; }

  std::optional<double> number(const std::string& key) const;
  std::optional<std::uint64_t> integer(const std::string& key) const;
  std::optional<bool> boolean(const std::string& key) const;
  std::optional<std::string> text(const std::string& key) const;

 private:
  std::map<std::string, ConfigEntry> entries_;
  std::filesystem::path base_dir_;
};

struct DomainConfig {
  MeshKind kind = MeshKind::Interval;
  std::size_t n = 511;
  int dim = 1;
  double radius = 1.0;
};

struct FamilyConfig {
  std::string family;  ///< empty when the config names no nonlinearity
  std::vector<std::pair<std::string, double>> params;
};

struct SourceConfig {
  enum class Kind { Zero, Constant, File };
  Kind kind = Kind::Zero;
  double value = 0.0;
  std::filesystem::path file;
  std::vector<double> file_values;
  std::size_t line = 0;
};

struct LambdaConfig {
  std::optional<double> scalar;
  bool has_grid = false;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
  bool log_spacing = true;
  /// Values are multiples of lambda_star instead of absolute.
  bool relative = false;
};

struct SolverConfig {
  double tol = 1e-9;
  double rel_target = 1e-8;
  std::size_t max_iter = 300;
  double damping = 0.5;
};

struct ThresholdConfig {
  std::optional<double> lo;
  std::optional<double> hi;
  double rel_width = 0.01;
};

struct SweepConfig {
  bool warm_start = true;
  bool compare_cold = true;
  std::optional<double> gap_tol;
};

struct VerifyConfig {
  std::size_t n = 255;
  std::size_t simon_samples = 100000;
  std::size_t hardy_samples = 200;
  std::size_t comparison_pairs = 50;
  std::size_t bound_samples = 100;
  std::optional<double> simon_cp;
};

struct RunConfig {
  double p = 2.0;
  DomainConfig domain;
  FamilyConfig f;
  SourceConfig h;
  LambdaConfig lambda;
  SolverConfig solver;
  ThresholdConfig threshold;
  SweepConfig sweep;
  VerifyConfig verify;
  std::uint64_t seed = 0;
  std::string output = "out";
  /// Raw entries, echoed into run.json.
  std::map<std::string, std::string> echo;
};

/// Validates keys and values. Throws ConfigError carrying the offending line.
RunConfig build_run_config(const ConfigFile& file);

}  // namespace singlap::cli
