#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "singlap/barriers.hpp"
#include "singlap/eigenpair.hpp"
#include "singlap/fixedpoint.hpp"
#include "singlap/grid.hpp"
#include "singlap/nonlin.hpp"
#include "singlap/plap.hpp"

namespace singlap {

/// One instance of -Delta_p u = lambda f(u) + h, u = 0 on the boundary.
struct ProblemSpec {
  PValue p;
  MeshPtr mesh;
  Nonlinearity f;
  /// Nonnegative source term (free-node values).
  GridFunction h;
  FixedPointOptions solver{};
  BarrierOptions barrier{};
  EigenOptions eigen{};
};

/// Problem plus everything derived from it once: assumption report, eigenpair, barriers.
struct PreparedProblem {
  ProblemSpec spec;
  AssumptionReport report;
  EigenPair eigen;
  BarrierPack pack;

  /// Upper barrier for lambda in [lambda_star, Lambda].
  UpperPack upper(double Lambda) const;
  TruncationContext truncation(double lambda, const UpperPack& upper) const;
};

/// Validates f, computes the eigenpair and the barriers. Throws InvalidArgument when
/// h is negative somewhere or the assumptions on f fail.
PreparedProblem prepare(const ProblemSpec& spec);

struct BranchPoint {
  double lambda = 0.0;
  GridFunction u;
  double sup_norm = 0.0;
  double min_u_over_d = 0.0;
  std::size_t iterations = 0;
  /// Weak residual of the truncated equation.
  double residual = 0.0;
  /// Weak residual of the untruncated equation.
  double plain_residual = 0.0;
  double target = 0.0;
  bool converged = false;
  bool in_sandwich = false;
  std::string method;
  std::string failure;
};

struct Branch {
  std::vector<BranchPoint> points;
  double lambda_star = 0.0;
  double Lambda_max = 0.0;
  UpperPack upper;
  bool warm_start = true;

  /// Every point converged.
  bool complete() const noexcept;
};

/// Solves at every grid value. The grid must be strictly increasing and start at or
/// above lambda_star. Cold-start chains run on up to `jobs` threads. Failed points are
/// kept with converged = false.
Branch trace_branch(const PreparedProblem& problem, const std::vector<double>& lambda_grid, bool warm_start,
                    std::size_t jobs = 1);

struct ConnectednessReport {
  bool passed = true;
  /// max_i ||u_{i+1} - u_i|| / (lambda_{i+1} - lambda_i + 1).
  double largest_gap = 0.0;
  /// Index i of the pair (i, i+1) with the largest gap.
  std::size_t gap_index = 0;
};

ConnectednessReport check_connectedness(const Branch& branch, double gap_tol);

/// Solve without barriers (any lambda > 0): damped Newton on the untruncated equation
/// with values floored at u_floor. Start from `start` when given, else from three
/// Picard sweeps of S(lambda max(f, 0) + h) beginning at S(lambda + h).
struct ExploratoryResult {
  bool converged = false;
  bool floor_active = false;
  GridFunction u;
  double residual = 0.0;
  double target = 0.0;
  std::size_t iterations = 0;
  std::size_t attempts = 0;

  /// Converged with every free value off the floor.
  bool solvable() const noexcept { return converged && !floor_active; }
};

ExploratoryResult solve_exploratory(double lambda, const ProblemSpec& spec, const GridFunction* start = nullptr,
                                    double u_floor = 1e-12);

struct SolvabilityTrial {
  double lambda = 0.0;
  bool solvable = false;
  /// "barrier" above lambda_star, "exploratory" below.
  std::string mode;
  double residual = 0.0;
  std::size_t attempts = 0;
};

/// Solvability at one lambda, using the barrier machinery at or above lambda_star and
/// the exploratory solver below it. A failed trial is retried once from a start scaled by 1.25.
SolvabilityTrial probe_solvability(const PreparedProblem& problem, double lambda, const GridFunction* warm = nullptr,
                                   GridFunction* solution = nullptr);

struct ThresholdOptions {
  /// Stop when hi - lo <= max(abs_width, rel_width * hi).
  double rel_width = 0.01;
  double abs_width = 0.0;
  std::size_t max_trials = 200;
};

struct ThresholdEstimate {
  double lambda0_lo = 0.0;  ///< largest tested lambda without a solution
  double lambda0_hi = 0.0;  ///< smallest tested lambda with a solution
  double width = 0.0;
  std::vector<SolvabilityTrial> trials;
};

/// Bisection on solvability (geometric midpoints while hi/lo > 4). Throws
/// InvalidArgument when hi < lo and NoDichotomy when the endpoints agree.
ThresholdEstimate find_threshold(const PreparedProblem& problem, double lambda_lo, double lambda_hi,
                                 const ThresholdOptions& opts = {});

struct MonotonicityReport {
  bool passed = true;
  std::vector<bool> solvable;
  /// Number of solvable -> unsolvable flips along the list.
  std::size_t violations = 0;
};

/// Flags must read false..false, true..true along the increasing list.
MonotonicityReport solvability_monotonicity(const PreparedProblem& problem, const std::vector<double>& lambdas);

/// Weak residual of -Delta_p u = lambda f(u) + h without truncation.
double plain_residual(const ProblemSpec& spec, double lambda, const GridFunction& u);

}  // namespace singlap
