#include "singlap/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "singlap/calibrated.hpp"
#include "singlap/errors.hpp"

namespace singlap::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  for (std::size_t i = 0; i < key.size(); ++i) {
    const char c = key[i];
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
    if (!ok) return false;
    if (c == '.' && key[i + 1] == '.') return false;
  }
  return true;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text, std::filesystem::path base_dir) {
  ConfigFile cfg;
  cfg.base_dir_ = std::move(base_dir);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError("invalid key '" + std::string(key) + "'", line_no);
    if (value.empty()) throw ConfigError("empty value for '" + std::string(key) + "'", line_no);
    const auto [it, inserted] = cfg.entries_.emplace(std::string(key), ConfigEntry{std::string(value), line_no});
    if (!inserted) {
      throw ConfigError("duplicate key '" + std::string(key) + "' (first set on line " +
                            std::to_string(it->second.line) + ")",
                        line_no);
    }
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.parent_path());
}

const ConfigEntry* ConfigFile::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<double> ConfigFile::number(const std::string& key) const {
  const ConfigEntry* e = find(key);
  if (e == nullptr) return std::nullopt;
  const auto v = parse_double(e->value);
  if (!v) throw ConfigError("'" + key + "' must be a finite number, got '" + e->value + "'", e->line);
  return v;
}

std::optional<std::uint64_t> ConfigFile::integer(const std::string& key) const {
  const ConfigEntry* e = find(key);
  if (e == nullptr) return std::nullopt;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (ec != std::errc() || ptr != e->value.data() + e->value.size()) {
    throw ConfigError("'" + key + "' must be a nonnegative integer, got '" + e->value + "'", e->line);
  }
  return v;
}

std::optional<bool> ConfigFile::boolean(const std::string& key) const {
  const ConfigEntry* e = find(key);
  if (e == nullptr) return std::nullopt;
  if (e->value == "true") return true;
  if (e->value == "false") return false;
  throw ConfigError("'" + key + "' must be true or false, got '" + e->value + "'", e->line);
}

std::optional<std::string> ConfigFile::text(const std::string& key) const {
  const ConfigEntry* e = find(key);
  if (e == nullptr) return std::nullopt;
  return e->value;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "p",
      "domain.kind", "domain.n", "domain.dim", "domain.radius",
      "f.family", "f.q", "f.beta", "f.alpha", "f.a",
      "h.kind", "h.value", "h.file",
      "lambda", "lambda.min", "lambda.max", "lambda.count", "lambda.spacing", "lambda.unit",
      "solver.tol", "solver.rel_target", "solver.max_iter", "solver.damping",
      "threshold.lo", "threshold.hi", "threshold.rel_width",
      "sweep.warm_start", "sweep.compare_cold", "sweep.gap_tol",
      "verify.n", "verify.simon_samples", "verify.hardy_samples", "verify.comparison_pairs",
      "verify.bound_samples", "verify.simon_cp",
      "seed", "output"};
  return keys;
}

std::size_t line_of(const ConfigFile& file, const std::string& key) {
  const ConfigEntry* e = file.find(key);
  return e != nullptr ? e->line : 0;
}

double positive(const ConfigFile& file, const std::string& key, double fallback) {
  const double v = file.number(key).value_or(fallback);
  if (!(v > 0.0)) throw ConfigError("'" + key + "' must be positive", line_of(file, key));
  return v;
}

struct FamilyParams {
  const char* name;
  std::vector<std::pair<const char*, double>> defaults;
};

const std::vector<FamilyParams>& family_table() {
  static const std::vector<FamilyParams> table = {
      {"a", {{"q", 0.5}, {"beta", 0.5}}},  {"b", {{"beta", 0.3}, {"alpha", 0.6}}},
      {"c", {{"a", 1.0}, {"alpha", 0.5}}}, {"d", {{"alpha", 0.5}, {"q", 0.5}}},
      {"e", {{"alpha", 0.5}}},             {"f", {}},
  };
  return table;
}

std::vector<double> read_nodal_file(const std::filesystem::path& path, std::size_t line) {
  std::ifstream in(path);
  if (!in) throw ConfigError("h.file '" + path.string() + "' does not exist or cannot be read", line);
  std::vector<double> values;
  std::string row;
  std::size_t row_no = 0;
  while (std::getline(in, row)) {
    ++row_no;
    std::string_view s = row;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (!s.empty() && s.back() == '\r') s = trim(s.substr(0, s.size() - 1));
    if (s.empty()) continue;
    const auto v = parse_double(s);
    if (!v) {
      throw ConfigError("h.file row " + std::to_string(row_no) + " is not a finite number", line);
    }
    if (*v < 0.0) throw ConfigError("h.file row " + std::to_string(row_no) + " is negative", line);
    values.push_back(*v);
  }
  return values;
}

}  // namespace

RunConfig build_run_config(const ConfigFile& file) {
  for (const auto& [key, entry] : file.entries()) {
    if (!known_keys().count(key)) throw ConfigError("unknown key '" + key + "'", entry.line);
  }
  RunConfig cfg;
  for (const auto& [key, entry] : file.entries()) cfg.echo[key] = entry.value;

  cfg.p = file.number("p").value_or(2.0);
  if (!(cfg.p > 1.0)) throw ConfigError("'p' must exceed 1", line_of(file, "p"));

  const std::string kind = file.text("domain.kind").value_or("interval");
  if (kind == "interval") {
    cfg.domain.kind = MeshKind::Interval;
    for (const char* k : {"domain.dim", "domain.radius"}) {
      if (file.has(k)) throw ConfigError(std::string("'") + k + "' applies to radial domains only", line_of(file, k));
    }
  } else if (kind == "radial") {
    cfg.domain.kind = MeshKind::Radial;
    cfg.domain.dim = static_cast<int>(file.integer("domain.dim").value_or(1));
    cfg.domain.radius = file.number("domain.radius").value_or(1.0);
  } else {
    throw ConfigError("'domain.kind' must be interval or radial", line_of(file, "domain.kind"));
  }
  cfg.domain.n = file.integer("domain.n").value_or(511);

  if (const auto fam = file.text("f.family")) {
    const auto& table = family_table();
    const auto it = std::find_if(table.begin(), table.end(), [&](const FamilyParams& fp) { return *fam == fp.name; });
    if (it == table.end()) throw ConfigError("'f.family' must be one of a, b, c, d, e, f", line_of(file, "f.family"));
    cfg.f.family = *fam;
    for (const auto& [name, def] : it->defaults) {
      cfg.f.params.emplace_back(name, file.number(std::string("f.") + name).value_or(def));
    }
    for (const char* k : {"q", "beta", "alpha", "a"}) {
      const std::string key = std::string("f.") + k;
      const bool applies = std::any_of(it->defaults.begin(), it->defaults.end(),
                                       [&](const auto& d) { return std::string_view(d.first) == k; });
      if (file.has(key) && !applies) {
        throw ConfigError("'" + key + "' does not apply to family " + *fam, line_of(file, key));
      }
    }
  } else {
    for (const char* k : {"f.q", "f.beta", "f.alpha", "f.a"}) {
      if (file.has(k)) throw ConfigError(std::string("'") + k + "' given without f.family", line_of(file, k));
    }
  }

  const std::string hk = file.text("h.kind").value_or("zero");
  cfg.h.line = line_of(file, "h.kind");
  if (hk == "zero") {
    cfg.h.kind = SourceConfig::Kind::Zero;
  } else if (hk == "constant") {
    cfg.h.kind = SourceConfig::Kind::Constant;
    const auto v = file.number("h.value");
    if (!v) throw ConfigError("h.kind = constant needs h.value", cfg.h.line);
    if (*v < 0.0) throw ConfigError("'h.value' must be nonnegative", line_of(file, "h.value"));
    cfg.h.value = *v;
  } else if (hk == "file") {
    cfg.h.kind = SourceConfig::Kind::File;
    const auto path = file.text("h.file");
    if (!path) throw ConfigError("h.kind = file needs h.file", cfg.h.line);
    cfg.h.file = file.base_dir() / *path;
    cfg.h.line = line_of(file, "h.file");
    cfg.h.file_values = read_nodal_file(cfg.h.file, cfg.h.line);
  } else {
    throw ConfigError("'h.kind' must be zero, constant or file", cfg.h.line);
  }
  if (cfg.h.kind != SourceConfig::Kind::Constant && file.has("h.value")) {
    throw ConfigError("'h.value' requires h.kind = constant", line_of(file, "h.value"));
  }
  if (cfg.h.kind != SourceConfig::Kind::File && file.has("h.file")) {
    throw ConfigError("'h.file' requires h.kind = file", line_of(file, "h.file"));
  }

  const std::string unit = file.text("lambda.unit").value_or("absolute");
  if (unit != "absolute" && unit != "lambda_star") {
    throw ConfigError("'lambda.unit' must be absolute or lambda_star", line_of(file, "lambda.unit"));
  }
  cfg.lambda.relative = unit == "lambda_star";
  if (file.has("lambda")) cfg.lambda.scalar = positive(file, "lambda", 1.0);
  const bool any_grid = file.has("lambda.min") || file.has("lambda.max") || file.has("lambda.count") ||
                        file.has("lambda.spacing");
  if (any_grid) {
    for (const char* k : {"lambda.min", "lambda.max", "lambda.count"}) {
      if (!file.has(k)) throw ConfigError(std::string("lambda grid needs '") + k + "'", line_of(file, "lambda.min"));
    }
    cfg.lambda.has_grid = true;
    cfg.lambda.min = positive(file, "lambda.min", 1.0);
    cfg.lambda.max = positive(file, "lambda.max", 1.0);
    cfg.lambda.count = *file.integer("lambda.count");
    const std::string spacing = file.text("lambda.spacing").value_or("log");
    if (spacing != "log" && spacing != "linear") {
      throw ConfigError("'lambda.spacing' must be log or linear", line_of(file, "lambda.spacing"));
    }
    cfg.lambda.log_spacing = spacing == "log";
    if (cfg.lambda.max < cfg.lambda.min) {
      throw ConfigError("'lambda.max' must not be below 'lambda.min'", line_of(file, "lambda.max"));
    }
  }

  cfg.solver.tol = positive(file, "solver.tol", cfg.solver.tol);
  cfg.solver.rel_target = positive(file, "solver.rel_target", cfg.solver.rel_target);
  cfg.solver.max_iter = file.integer("solver.max_iter").value_or(cfg.solver.max_iter);
  cfg.solver.damping = positive(file, "solver.damping", cfg.solver.damping);
  if (cfg.solver.damping > 1.0) throw ConfigError("'solver.damping' must lie in (0, 1]", line_of(file, "solver.damping"));

  if (file.has("threshold.lo")) cfg.threshold.lo = positive(file, "threshold.lo", 1.0);
  if (file.has("threshold.hi")) cfg.threshold.hi = positive(file, "threshold.hi", 1.0);
  cfg.threshold.rel_width = positive(file, "threshold.rel_width", cfg.threshold.rel_width);

  cfg.sweep.warm_start = file.boolean("sweep.warm_start").value_or(true);
  cfg.sweep.compare_cold = file.boolean("sweep.compare_cold").value_or(true);
  if (file.has("sweep.gap_tol")) cfg.sweep.gap_tol = positive(file, "sweep.gap_tol", 1.0);

  cfg.verify.n = file.integer("verify.n").value_or(cfg.verify.n);
  cfg.verify.simon_samples = file.integer("verify.simon_samples").value_or(cfg.verify.simon_samples);
  cfg.verify.hardy_samples = file.integer("verify.hardy_samples").value_or(cfg.verify.hardy_samples);
  cfg.verify.comparison_pairs = file.integer("verify.comparison_pairs").value_or(cfg.verify.comparison_pairs);
  cfg.verify.bound_samples = file.integer("verify.bound_samples").value_or(cfg.verify.bound_samples);
  if (file.has("verify.simon_cp")) cfg.verify.simon_cp = positive(file, "verify.simon_cp", 1.0);

  cfg.seed = file.integer("seed").value_or(calibrated::seed);
  cfg.output = file.text("output").value_or("out");
  return cfg;
}

}  // namespace singlap::cli
