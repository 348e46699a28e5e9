#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "singlap/dirichlet.hpp"
#include "singlap/grid.hpp"
#include "singlap/nonlin.hpp"
#include "singlap/plap.hpp"

namespace singlap {

/// Order interval [u_lower, u_upper] and the nonlinearity truncated to it.
struct TruncationContext {
  GridFunction u_lower;
  GridFunction u_upper;
  Nonlinearity f;
  double Lambda = 0.0;
  /// Smallest admissible lambda (the lower barrier exists from here on).
  double lambda_star = 0.0;

  /// Throws InvalidArgument unless 0 < u_lower <= u_upper at free nodes and lambda_star <= Lambda.
  TruncationContext(GridFunction lower, GridFunction upper, Nonlinearity fn, double Lambda, double lambda_star);
};

/// f(u_lower) where u < u_lower, f(u) in between, f(u_upper) where u > u_upper (free nodes only).
GridFunction truncate_f(const GridFunction& u, const TruncationContext& ctx);

/// Smallest C with |f_Lambda(u)| d^beta <= C at every free node, for every u.
double bound_truncation(const TruncationContext& ctx, const GridFunction& d, double beta);

/// S(lambda f_Lambda(u) + h). Throws DomainError for lambda outside [lambda_star, Lambda].
GridFunction T_map(double lambda, const GridFunction& u, const TruncationContext& ctx, const GridFunction& h,
                   PValue p, const SolveOptions& opts = {});

struct FixedPointOptions {
  /// Weak residual tolerance of the truncated equation (capped relative to the data).
  double tol = 1e-9;
  double rel_target = 1e-8;
  std::size_t max_iter = 300;
  double damping = 0.5;
  std::size_t max_newton = 100;
  /// Iterations without residual improvement that count as a Picard stall.
  std::size_t stall_window = 25;
};

struct FixedPointResult {
  bool converged = false;
  GridFunction u_star;
  std::size_t iterations = 0;
  double residual = 0.0;
  double target = 0.0;
  bool in_sandwich = false;
  /// Sup-norm increment per Picard iteration.
  std::vector<double> history;
  /// "picard" or "newton".
  std::string method;
  std::string failure;
};

/// Damped Picard from u_lower, Newton on the truncated residual if Picard stalls.
/// Double failure is reported as converged = false (a no-solution witness).
FixedPointResult solve_fixed_point(double lambda, const TruncationContext& ctx, const GridFunction& h, PValue p,
                                   const FixedPointOptions& opts = {}, const GridFunction* start = nullptr);

/// u_lower - slack <= u <= u_upper + slack at every node.
bool in_sandwich(const GridFunction& u, const TruncationContext& ctx, double slack);

namespace detail {

/// Writes source values s_i and derivatives ds_i at free nodes for the iterate u.
using SourceFn = std::function<void(std::span<const double> u, std::span<double> s, std::span<double> ds)>;

struct NewtonOutcome {
  bool converged = false;
  std::vector<double> u;
  double residual = 0.0;
  std::size_t iterations = 0;
  /// Some free node sat on the positivity floor at the end.
  bool floor_active = false;
};

/// Damped Newton on w_i((-Delta_p u)_i - s_i(u)) = 0 with a residual-norm line search.
/// A positive u_floor projects free values onto [u_floor, inf) after each step.
NewtonOutcome newton_semilinear(const Mesh& mesh, PValue p, std::vector<double> u, const SourceFn& source,
                                double target, std::size_t max_iter, double u_floor = 0.0);

/// Max over free nodes of |w_i((-Delta_p u)_i - s_i(u))|.
double semilinear_residual(const Mesh& mesh, PValue p, std::span<const double> u, const SourceFn& source);

}  // namespace detail

}  // namespace singlap
