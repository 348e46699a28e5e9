#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "singlap/barriers.hpp"
#include "singlap/continuum.hpp"
#include "singlap/grid.hpp"
#include "singlap/nonlin.hpp"

namespace singlap::cli {

using Json = nlohmann::ordered_json;

/// Round-trip decimal form (17 significant digits); "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

/// Writes the whole file or throws Error.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Pretty-printed JSON followed by a newline.
std::string dump(const Json& doc);

/// Columns x, u, d, u_lower, u_upper; barrier columns are left empty when absent.
std::string solution_csv(const GridFunction& u, const GridFunction* lower, const GridFunction* upper);

/// Columns lambda, sup_norm, min_u_over_d, iterations, residual, converged, in_sandwich.
std::string branch_csv(const Branch& branch);

std::string eigen_csv(const GridFunction& phi);

Json mesh_json(const Mesh& mesh);
Json assumptions_json(const AssumptionReport& report);
Json barrier_json(const BarrierPack& pack);
Json upper_json(const UpperPack& upper);
/// Every frozen calibration constant, keyed by exponent where it depends on p.
Json calibrated_json();

}  // namespace singlap::cli
