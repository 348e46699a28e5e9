#include "singlap/continuum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "singlap/dirichlet.hpp"
#include "singlap/errors.hpp"

namespace singlap {

PreparedProblem prepare(const ProblemSpec& spec) {
  const Mesh& mesh = *spec.mesh;
  if (spec.h.size() != mesh.node_count()) throw InvalidArgument("prepare: h has the wrong size");
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    if (!(spec.h[i] >= 0.0) || !std::isfinite(spec.h[i])) {
      throw InvalidArgument("prepare: h must be finite and nonnegative (node " + std::to_string(i) + ")");
    }
  }
  PreparedProblem prob{spec, validate_assumptions(spec.f, spec.p), {}, {}};
  if (const HypothesisCheck* bad = prob.report.first_failure()) {
    throw InvalidArgument("prepare: hypothesis '" + bad->name + "' fails at s = " + std::to_string(bad->witness) +
                          " (" + bad->detail + ")");
  }
  prob.eigen = first_eigenpair(spec.p, spec.mesh, spec.eigen);
  prob.pack = build_barriers(prob.report, spec.p, spec.mesh, prob.eigen, spec.barrier);
  return prob;
}

UpperPack PreparedProblem::upper(double Lambda) const {
  return upper_constants(Lambda, report, spec.f, spec.h.sup_norm(), pack, spec.p);
}

TruncationContext PreparedProblem::truncation(double lambda, const UpperPack& up) const {
  return TruncationContext(lower_solution(lambda, pack), up.u_upper, spec.f, up.Lambda, pack.lambda_star);
}

double plain_residual(const ProblemSpec& spec, double lambda, const GridFunction& u) {
  const Mesh& mesh = u.mesh();
  std::vector<double> rhs(u.size(), 0.0);
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    if (!(u[i] > 0.0)) return std::numeric_limits<double>::infinity();
    rhs[i] = lambda * spec.f(u[i]) + spec.h[i];
  }
  return weak_residual(u, u.with_values(std::move(rhs), false), spec.p);
}

bool Branch::complete() const noexcept {
  return std::all_of(points.begin(), points.end(), [](const BranchPoint& pt) { return pt.converged; });
}

namespace {

BranchPoint solve_point(const PreparedProblem& prob, const UpperPack& up, double lambda, const GridFunction* start) {
  BranchPoint pt;
  pt.lambda = lambda;
  try {
    const TruncationContext ctx = prob.truncation(lambda, up);
    FixedPointResult r = solve_fixed_point(lambda, ctx, prob.spec.h, prob.spec.p, prob.spec.solver, start);
    pt.u = r.u_star;
    pt.iterations = r.iterations;
    pt.residual = r.residual;
    pt.target = r.target;
    pt.converged = r.converged;
    pt.in_sandwich = r.in_sandwich;
    pt.method = r.method;
    pt.failure = r.failure;
  } catch (const Error& e) {
    pt.failure = e.what();
    pt.u = GridFunction::zeros(prob.spec.mesh);
  }
  const Mesh& mesh = *prob.spec.mesh;
  const GridFunction d = distance_field(prob.spec.mesh);
  pt.sup_norm = pt.u.sup_norm();
  pt.min_u_over_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    pt.min_u_over_d = std::min(pt.min_u_over_d, pt.u[i] / d[i]);
  }
  pt.plain_residual = plain_residual(prob.spec, lambda, pt.u);
  return pt;
}

void require_increasing(const std::vector<double>& grid, const char* where) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || !(grid[i] > 0.0)) {
      throw InvalidArgument(std::string(where) + ": lambda values must be positive and finite");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InvalidArgument(std::string(where) + ": lambda values must be strictly increasing");
    }
  }
}

}  // namespace

Branch trace_branch(const PreparedProblem& prob, const std::vector<double>& grid, bool warm_start, std::size_t jobs) {
  if (grid.empty()) throw InvalidArgument("trace_branch: empty lambda grid");
  require_increasing(grid, "trace_branch");
  if (grid.front() < prob.pack.lambda_star) {
    throw DomainError("lambda below lambda_star (" + std::to_string(grid.front()) + " < " +
                      std::to_string(prob.pack.lambda_star) + ")");
  }
  Branch br;
  br.lambda_star = prob.pack.lambda_star;
  br.Lambda_max = grid.back();
  br.upper = prob.upper(br.Lambda_max);
  br.warm_start = warm_start;
  br.points.resize(grid.size());

  if (warm_start) {
    const GridFunction* prev = nullptr;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      br.points[k] = solve_point(prob, br.upper, grid[k], prev);
      prev = br.points[k].converged ? &br.points[k].u : nullptr;
    }
    return br;
  }
  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, grid.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t k = next++; k < grid.size(); k = next++) br.points[k] = solve_point(prob, br.upper, grid[k], nullptr);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return br;
}

ConnectednessReport check_connectedness(const Branch& branch, double gap_tol) {
  ConnectednessReport rep;
  for (std::size_t i = 0; i + 1 < branch.points.size(); ++i) {
    const BranchPoint& a = branch.points[i];
    const BranchPoint& b = branch.points[i + 1];
    const double gap = sup_distance(a.u, b.u) / (b.lambda - a.lambda + 1.0);
    if (gap > rep.largest_gap) {
      rep.largest_gap = gap;
      rep.gap_index = i;
    }
  }
  rep.passed = rep.largest_gap <= gap_tol;
  return rep;
}

namespace {

GridFunction solve_source(const ProblemSpec& spec, std::vector<double> rhs) {
  const GridFunction g(spec.mesh, std::move(rhs), false);
  return solve_S(SingularRHS::fit(g, 0.999), spec.p);
}

GridFunction exploratory_start(double lambda, const ProblemSpec& spec, double u_floor) {
  const Mesh& mesh = *spec.mesh;
  std::vector<double> rhs(mesh.node_count(), 0.0);
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) rhs[i] = lambda + spec.h[i];
  GridFunction v = solve_source(spec, rhs);
  for (int sweep = 0; sweep < 3; ++sweep) {
    for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
      rhs[i] = lambda * std::max(spec.f(std::max(v[i], u_floor)), 0.0) + spec.h[i];
    }
    v = solve_source(spec, rhs);
  }
  return v;
}

GridFunction scaled(const GridFunction& u, double factor) {
  std::vector<double> v(u.values().begin(), u.values().end());
  for (double& x : v) x *= factor;
  return u.with_values(std::move(v), true);
}

}  // namespace

ExploratoryResult solve_exploratory(double lambda, const ProblemSpec& spec, const GridFunction* start,
                                    double u_floor) {
  if (!(lambda > 0.0)) throw InvalidArgument("solve_exploratory: lambda must be positive");
  if (!(u_floor > 0.0)) throw InvalidArgument("solve_exploratory: u_floor must be positive");
  const Mesh& mesh = *spec.mesh;
  const std::size_t lo = mesh.free_begin();
  const std::size_t hi = mesh.free_end();
  detail::SourceFn source = [&](std::span<const double> u, std::span<double> s, std::span<double> ds) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double v = std::max(u[i], u_floor);
      s[i] = lambda * spec.f(v) + spec.h[i];
      ds[i] = u[i] > u_floor ? lambda * spec.f.derivative(v) : 0.0;
    }
  };
  auto target_at = [&](std::span<const double> u) {
    double ref = 0.0;
    double total = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double b = std::abs(mesh.weights[i] * (lambda * spec.f(std::max(u[i], u_floor)) + spec.h[i]));
      ref = std::max(ref, b);
      total += b;
    }
    return std::max(std::min(spec.solver.tol, spec.solver.rel_target * ref),
                    4.0 * residual_floor(mesh, spec.p, total));
  };

  const GridFunction u0 = start != nullptr ? *start : exploratory_start(lambda, spec, u_floor);
  ExploratoryResult res;
  res.attempts = 1;
  std::vector<double> u(u0.values().begin(), u0.values().end());
  detail::NewtonOutcome nt;
  // The target depends on the iterate; a second pass re-aims at the target of the result.
  for (int pass = 0; pass < 2; ++pass) {
    res.target = target_at(u);
    nt = detail::newton_semilinear(mesh, spec.p, std::move(u), source, res.target, spec.solver.max_newton, u_floor);
    res.iterations += nt.iterations;
    u = nt.u;
    if (!std::isfinite(nt.residual)) break;
    if (nt.residual <= target_at(u)) break;
  }
  res.target = target_at(u);
  res.residual = nt.residual;
  res.converged = nt.residual <= res.target;
  res.floor_active = nt.floor_active;
  res.u = GridFunction(spec.mesh, std::move(u), true);
  return res;
}

SolvabilityTrial probe_solvability(const PreparedProblem& prob, double lambda, const GridFunction* warm,
                                   GridFunction* solution) {
  if (!(lambda > 0.0)) throw InvalidArgument("probe_solvability: lambda must be positive");
  SolvabilityTrial trial;
  trial.lambda = lambda;
  if (lambda >= prob.pack.lambda_star) {
    trial.mode = "barrier";
    const UpperPack up = prob.upper(lambda);
    const TruncationContext ctx = prob.truncation(lambda, up);
    FixedPointResult r = solve_fixed_point(lambda, ctx, prob.spec.h, prob.spec.p, prob.spec.solver, warm);
    trial.attempts = 1;
    if (!r.converged) {
      const GridFunction perturbed = scaled(warm != nullptr ? *warm : ctx.u_lower, 1.25);
      r = solve_fixed_point(lambda, ctx, prob.spec.h, prob.spec.p, prob.spec.solver, &perturbed);
      trial.attempts = 2;
    }
    trial.solvable = r.converged;
    trial.residual = r.residual;
    if (solution != nullptr && r.converged) *solution = r.u_star;
    return trial;
  }
  trial.mode = "exploratory";
  const GridFunction first = warm != nullptr ? *warm : exploratory_start(lambda, prob.spec, 1e-12);
  ExploratoryResult r = solve_exploratory(lambda, prob.spec, &first);
  trial.attempts = 1;
  if (!r.solvable()) {
    const GridFunction perturbed = scaled(first, 1.25);
    ExploratoryResult again = solve_exploratory(lambda, prob.spec, &perturbed);
    trial.attempts = 2;
    if (again.solvable() || again.residual < r.residual) r = std::move(again);
  }
  trial.solvable = r.solvable();
  trial.residual = r.residual;
  if (solution != nullptr && trial.solvable) *solution = r.u;
  return trial;
}

ThresholdEstimate find_threshold(const PreparedProblem& prob, double lambda_lo, double lambda_hi,
                                 const ThresholdOptions& opts) {
  if (!(lambda_lo > 0.0) || !std::isfinite(lambda_hi)) throw InvalidArgument("find_threshold: need 0 < lo");
  if (lambda_hi < lambda_lo) throw InvalidArgument("find_threshold: lambda_hi < lambda_lo");
  ThresholdEstimate est;
  GridFunction hi_solution;
  est.trials.push_back(probe_solvability(prob, lambda_hi, nullptr, &hi_solution));
  est.trials.push_back(probe_solvability(prob, lambda_lo, est.trials[0].solvable ? &hi_solution : nullptr));
  const bool hi_ok = est.trials[0].solvable;
  const bool lo_ok = est.trials[1].solvable;
  if (hi_ok == lo_ok || lo_ok) {
    throw NoDichotomy(std::string("no dichotomy: solvability is ") + (hi_ok ? "true" : "false") + " at lambda_hi and " +
                      (lo_ok ? "true" : "false") + " at lambda_lo");
  }
  double lo = lambda_lo;
  double hi = lambda_hi;
  while (hi - lo > std::max(opts.abs_width, opts.rel_width * hi)) {
    if (est.trials.size() >= opts.max_trials) throw ThresholdNotFound("find_threshold: trial budget exhausted");
    const double mid = hi / lo > 4.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    GridFunction sol;
    const SolvabilityTrial t = probe_solvability(prob, mid, &hi_solution, &sol);
    est.trials.push_back(t);
    if (t.solvable) {
      hi = mid;
      hi_solution = std::move(sol);
    } else {
      lo = mid;
    }
  }
  est.lambda0_lo = lo;
  est.lambda0_hi = hi;
  est.width = hi - lo;
  return est;
}

MonotonicityReport solvability_monotonicity(const PreparedProblem& prob, const std::vector<double>& lambdas) {
  require_increasing(lambdas, "solvability_monotonicity");
  MonotonicityReport rep;
  GridFunction last;
  bool have_last = false;
  for (double lambda : lambdas) {
    GridFunction sol;
    const SolvabilityTrial t = probe_solvability(prob, lambda, have_last ? &last : nullptr, &sol);
    rep.solvable.push_back(t.solvable);
    if (t.solvable) {
      last = std::move(sol);
      have_last = true;
    }
  }
  for (std::size_t i = 0; i + 1 < rep.solvable.size(); ++i) {
    if (rep.solvable[i] && !rep.solvable[i + 1]) ++rep.violations;
  }
  rep.passed = rep.violations == 0;
  return rep;
}

}  // namespace singlap
