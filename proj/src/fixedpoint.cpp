#include "singlap/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "singlap/errors.hpp"
#include "singlap/tridiag.hpp"

namespace singlap {

TruncationContext::TruncationContext(GridFunction lower, GridFunction upper, Nonlinearity fn, double Lambda_,
                                     double lambda_star_)
    : u_lower(std::move(lower)), u_upper(std::move(upper)), f(std::move(fn)), Lambda(Lambda_),
      lambda_star(lambda_star_) {
  if (u_lower.size() != u_upper.size()) throw InvalidArgument("TruncationContext: barriers differ in size");
  if (!(lambda_star >= 0.0) || !(Lambda >= lambda_star)) {
    throw InvalidArgument("TruncationContext: need 0 <= lambda_star <= Lambda");
  }
  const Mesh& mesh = u_lower.mesh();
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    if (!(u_lower[i] > 0.0)) throw InvalidArgument("TruncationContext: u_lower must be positive at free nodes");
    if (!(u_lower[i] <= u_upper[i])) {
      throw InvalidArgument("TruncationContext: u_lower > u_upper at node " + std::to_string(i));
    }
  }
}

namespace {

double clamp_to(const TruncationContext& ctx, std::size_t i, double v) {
  return std::clamp(v, ctx.u_lower[i], ctx.u_upper[i]);
}

void check_lambda(double lambda, const TruncationContext& ctx) {
  if (!(lambda >= ctx.lambda_star && lambda <= ctx.Lambda)) {
    throw DomainError("lambda " + std::to_string(lambda) + " outside [" + std::to_string(ctx.lambda_star) + ", " +
                      std::to_string(ctx.Lambda) + "]");
  }
}

}  // namespace

GridFunction truncate_f(const GridFunction& u, const TruncationContext& ctx) {
  if (u.size() != ctx.u_lower.size()) throw InvalidArgument("truncate_f: size mismatch");
  const Mesh& mesh = u.mesh();
  std::vector<double> out(u.size(), 0.0);
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) out[i] = ctx.f(clamp_to(ctx, i, u[i]));
  return u.with_values(std::move(out), false);
}

double bound_truncation(const TruncationContext& ctx, const GridFunction& d, double beta) {
  const Mesh& mesh = ctx.u_lower.mesh();
  double c = 0.0;
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    const double lo = ctx.u_lower[i];
    const double hi = ctx.u_upper[i];
    double top = std::max(std::abs(ctx.f(lo)), std::abs(ctx.f(hi)));
    if (hi > lo) {
      // Interior extremes of |f| on [lo, hi], geometric sampling.
      const double ratio = std::pow(hi / lo, 1.0 / 64.0);
      double s = lo;
      for (int k = 1; k < 64; ++k) {
        s *= ratio;
        top = std::max(top, std::abs(ctx.f(s)));
      }
    }
    c = std::max(c, top * std::pow(d[i], beta));
  }
  return c;
}

GridFunction T_map(double lambda, const GridFunction& u, const TruncationContext& ctx, const GridFunction& h,
                   PValue p, const SolveOptions& opts) {
  check_lambda(lambda, ctx);
  const GridFunction fl = truncate_f(u, ctx);
  const Mesh& mesh = u.mesh();
  std::vector<double> rhs(u.size(), 0.0);
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) rhs[i] = lambda * fl[i] + h[i];
  // The truncation keeps the data admissible; the fitted weight constant is finite.
  return solve_S(SingularRHS::fit(u.with_values(std::move(rhs), false), 0.999), p, opts);
}

bool in_sandwich(const GridFunction& u, const TruncationContext& ctx, double slack) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < ctx.u_lower[i] - slack || u[i] > ctx.u_upper[i] + slack) return false;
  }
  return true;
}

namespace detail {

double semilinear_residual(const Mesh& mesh, PValue p, std::span<const double> u, const SourceFn& source) {
  std::vector<double> op(mesh.node_count());
  std::vector<double> s(mesh.node_count(), 0.0);
  std::vector<double> ds(mesh.node_count(), 0.0);
  weighted_operator(mesh, u, p, op);
  source(u, s, ds);
  double r = 0.0;
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    r = std::max(r, std::abs(op[i] - mesh.weights[i] * s[i]));
  }
  return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
}

NewtonOutcome newton_semilinear(const Mesh& mesh, PValue p, std::vector<double> u, const SourceFn& source,
                                double target, std::size_t max_iter, double u_floor) {
  const std::size_t lo = mesh.free_begin();
  const std::size_t hi = mesh.free_end();
  const std::size_t n = hi - lo;
  std::vector<double> op(mesh.node_count());
  std::vector<double> s(mesh.node_count(), 0.0);
  std::vector<double> ds(mesh.node_count(), 0.0);
  std::vector<double> step(n);
  std::vector<double> trial(u.size(), 0.0);
  Tridiagonal jac;

  auto project = [&](std::vector<double>& v) {
    if (u_floor <= 0.0) return;
    for (std::size_t i = lo; i < hi; ++i) v[i] = std::max(v[i], u_floor);
  };
  // Residual vector into op; returns its Euclidean norm (infinite when not finite).
  auto evaluate = [&](const std::vector<double>& v, Tridiagonal* j) {
    weighted_operator(mesh, v, p, op, j, j != nullptr ? 1e-12 : 0.0);
    source(v, s, ds);
    double sq = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      op[i] -= mesh.weights[i] * s[i];
      sq += op[i] * op[i];
    }
    return std::isfinite(sq) ? std::sqrt(sq) : std::numeric_limits<double>::infinity();
  };
  auto max_norm = [&]() {
    double r = 0.0;
    for (std::size_t i = lo; i < hi; ++i) r = std::max(r, std::abs(op[i]));
    return r;
  };

  project(u);
  NewtonOutcome out;
  double norm = evaluate(u, &jac);
  out.residual = max_norm();
  while (out.residual > target && out.iterations < max_iter && std::isfinite(norm)) {
    ++out.iterations;
    for (std::size_t i = lo; i < hi; ++i) {
      const std::size_t k = i - lo;
      jac.diag[k] -= mesh.weights[i] * ds[i];
      step[k] = -op[i];
    }
    if (!solve_tridiagonal(jac, step)) break;
    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt, alpha *= 0.5) {
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i];
      for (std::size_t i = lo; i < hi; ++i) trial[i] = u[i] + alpha * step[i - lo];
      project(trial);
      const double tn = evaluate(trial, nullptr);
      if (tn <= (1.0 - 1e-4 * alpha) * norm) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    u.swap(trial);
    norm = evaluate(u, &jac);
    out.residual = max_norm();
  }
  out.converged = out.residual <= target;
  if (u_floor > 0.0) {
    for (std::size_t i = lo; i < hi; ++i) out.floor_active = out.floor_active || u[i] <= u_floor;
  }
  out.u = std::move(u);
  return out;
}

}  // namespace detail

FixedPointResult solve_fixed_point(double lambda, const TruncationContext& ctx, const GridFunction& h, PValue p,
                                   const FixedPointOptions& opts, const GridFunction* start) {
  check_lambda(lambda, ctx);
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) throw InvalidArgument("solve_fixed_point: damping in (0,1]");
  const MeshPtr& mesh = ctx.u_lower.mesh_ptr();
  const std::size_t lo = mesh->free_begin();
  const std::size_t hi = mesh->free_end();

  detail::SourceFn truncated = [&](std::span<const double> u, std::span<double> s, std::span<double> ds) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double v = clamp_to(ctx, i, u[i]);
      s[i] = lambda * ctx.f(v) + h[i];
      ds[i] = (u[i] >= ctx.u_lower[i] && u[i] <= ctx.u_upper[i]) ? lambda * ctx.f.derivative(v) : 0.0;
    }
  };
  // Target relative to the size of the source at the lower barrier.
  double ref = 0.0;
  double total = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double b = std::abs(mesh->weights[i] * (lambda * ctx.f(ctx.u_lower[i]) + h[i]));
    ref = std::max(ref, b);
    total += b;
  }
  FixedPointResult res;
  res.target = std::max(std::min(opts.tol, opts.rel_target * ref), 4.0 * residual_floor(*mesh, p, total));

  GridFunction u = start != nullptr ? *start : ctx.u_lower;
  SolveOptions inner;
  inner.rel_target = 0.1 * opts.rel_target;
  res.method = "picard";
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  GridFunction best_u = u;
  try {
    for (std::size_t it = 0; it < opts.max_iter; ++it) {
      const double r = detail::semilinear_residual(*mesh, p, u.values(), truncated);
      if (r < best) {
        best = r;
        best_u = u;
        since_best = 0;
      } else if (++since_best >= opts.stall_window) {
        break;
      }
      res.residual = r;
      if (r <= res.target) {
        res.converged = true;
        break;
      }
      inner.start.assign(u.values().begin(), u.values().end());
      const GridFunction t = T_map(lambda, u, ctx, h, p, inner);
      std::vector<double> next(u.size());
      double inc = 0.0;
      for (std::size_t i = 0; i < next.size(); ++i) {
        next[i] = (1.0 - opts.damping) * u[i] + opts.damping * t[i];
        inc = std::max(inc, std::abs(next[i] - u[i]));
      }
      res.history.push_back(inc);
      res.iterations = it + 1;
      u = GridFunction(mesh, std::move(next), true);
    }
  } catch (const SolverFailure& e) {
    res.failure = std::string("picard: ") + e.what();
  }

  if (!res.converged) {
    res.method = "newton";
    std::vector<double> u0(best_u.values().begin(), best_u.values().end());
    const detail::NewtonOutcome nt =
        detail::newton_semilinear(*mesh, p, std::move(u0), truncated, res.target, opts.max_newton);
    res.iterations += nt.iterations;
    res.residual = nt.residual;
    res.converged = nt.converged;
    if (nt.converged) {
      u = GridFunction(mesh, nt.u, true);
    } else {
      res.failure += (res.failure.empty() ? "" : "; ") + std::string("newton stalled at residual ") +
                     std::to_string(nt.residual);
      u = best_u;
      res.residual = std::min(best, nt.residual);
    }
  }
  res.u_star = u;
  res.in_sandwich = res.converged && in_sandwich(u, ctx, 100.0 * opts.tol);
  return res;
}

}  // namespace singlap
