#include "singlap/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "singlap/errors.hpp"

namespace singlap {

SingularRHS::SingularRHS(GridFunction values, double weight_constant, double beta)
    : values_(std::move(values)), weight_constant_(weight_constant), beta_(beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("singular rhs: beta must lie in (0,1)");
  if (!(weight_constant >= 0.0) || !std::isfinite(weight_constant)) {
    throw InvalidArgument("singular rhs: weight constant must be finite and >= 0");
  }
  const Mesh& mesh = values_.mesh();
  const GridFunction d = distance_field(values_.mesh_ptr());
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    const double bound = weight_constant / std::pow(d[i], beta);
    if (!std::isfinite(values_[i]) || std::abs(values_[i]) > bound * (1.0 + 1e-12)) {
      throw InvalidArgument("singular rhs: |g| exceeds C/d^beta at node " + std::to_string(i));
    }
  }
}

SingularRHS SingularRHS::fit(GridFunction values, double beta) {
  const Mesh& mesh = values.mesh();
  const GridFunction d = distance_field(values.mesh_ptr());
  double c = 0.0;
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    c = std::max(c, std::abs(values[i]) * std::pow(d[i], beta));
  }
  return SingularRHS(std::move(values), c, beta);
}

double SolveOptions::tolerance_for(PValue p) const noexcept {
  if (tol_residual > 0.0) return tol_residual;
  return p.value() == 2.0 ? 1e-10 : 1e-8;
}

namespace {

Tridiagonal laplacian_matrix(const Mesh& mesh) {
  const std::size_t lo = mesh.free_begin();
  const std::size_t hi = mesh.free_end();
  const std::size_t n = hi - lo;
  Tridiagonal a(n);
  for (std::size_t i = lo; i < hi; ++i) {
    const std::size_t k = i - lo;
    const double kl = i > 0 ? mesh.face_area[i - 1] / mesh.spacing : 0.0;
    const double kr = mesh.face_area[i] / mesh.spacing;
    a.diag[k] = kl + kr;
    if (k + 1 < n) {
      a.super[k] = -kr;
      a.sub[k] = -kr;
    }
  }
  return a;
}

/// Newton/gradient machinery for min J(u) = E_p(u) - <b, u>, b_i = g_i w_i.
class EnergySolver {
 public:
  EnergySolver(const Mesh& mesh, PValue p, std::vector<double> b, const SolveOptions& opts)
      : mesh_(mesh), p_(p), b_(std::move(b)), opts_(opts), lo_(mesh.free_begin()), hi_(mesh.free_end()) {}

  double energy(const std::vector<double>& u) const {
    double lin = 0.0;
    for (std::size_t i = lo_; i < hi_; ++i) lin += b_[i] * u[i];
    return detail::gradient_energy(mesh_, u, p_) - lin;
  }

  /// Gradient into grad (full-node layout), returns its max norm.
  double gradient(const std::vector<double>& u, std::vector<double>& grad, Tridiagonal* jac = nullptr) const {
    detail::weighted_operator(mesh_, u, p_, grad, jac, jac != nullptr ? 1e-12 : 0.0);
    double r = 0.0;
    for (std::size_t i = lo_; i < hi_; ++i) {
      grad[i] -= b_[i];
      r = std::max(r, std::abs(grad[i]));
    }
    return r;
  }

  std::vector<double> scaled_poisson_start() const {
    std::vector<double> v(mesh_.node_count(), 0.0);
    std::vector<double> rhs(b_.begin() + lo_, b_.begin() + hi_);
    if (!solve_tridiagonal(laplacian_matrix(mesh_), rhs)) return v;
    std::copy(rhs.begin(), rhs.end(), v.begin() + lo_);
    if (p_.value() == 2.0) return v;
    const double a = p_.value() * detail::gradient_energy(mesh_, v, p_);
    double bv = 0.0;
    for (std::size_t i = lo_; i < hi_; ++i) bv += b_[i] * v[i];
    if (!(a > 0.0) || !(bv > 0.0)) return std::vector<double>(mesh_.node_count(), 0.0);
    const double alpha = std::pow(bv / a, 1.0 / (p_.value() - 1.0));
    for (double& x : v) x *= alpha;
    return v;
  }

  /// Inverse of the regularized flux law t -> (t^2 + eps^2)^{(p-2)/2} t.
  double invert_flux(double y) const {
    if (y == 0.0) return 0.0;
    const double pv = p_.value();
    const double sign = y < 0.0 ? -1.0 : 1.0;
    const double ay = std::abs(y);
    double t = std::pow(ay, 1.0 / (pv - 1.0));
    const double eps = p_.regularization();
    if (eps == 0.0) return sign * t;
    // For p < 2 the flux is concave on t > 0 and the start lies below the root,
    // so plain Newton increases monotonically to it.
    const double eps2 = eps * eps;
    for (int it = 0; it < 60; ++it) {
      const double s = t * t + eps2;
      const double m = std::pow(s, 0.5 * (pv - 2.0));
      const double f = m * t - ay;
      const double df = m * (1.0 + (pv - 2.0) * t * t / s);
      const double next = t - f / df;
      if (!(next > t) || next - t <= 1e-16 * next) {
        t = std::max(t, next);
        break;
      }
      t = next;
    }
    return sign * t;
  }

  /// Exact solution of the 1-D conservation law: face fluxes follow from summing b,
  /// slopes from inverting the flux law, values from integrating the slopes.
  std::vector<double> flux_integral_start() const {
    const std::size_t nodes = mesh_.node_count();
    const std::size_t edges = mesh_.edge_count();
    std::vector<double> cum(edges, 0.0);  // sum of b over free nodes k <= e
    double acc = 0.0;
    for (std::size_t e = 0; e < edges; ++e) {
      if (e >= lo_ && e < hi_) acc += b_[e];
      cum[e] = acc;
    }
    std::vector<double> slope(edges, 0.0);
    auto slopes_for = [&](double c) {
      double total = 0.0;
      for (std::size_t e = 0; e < edges; ++e) {
        slope[e] = invert_flux((c - cum[e]) / mesh_.face_area[e]);
        total += slope[e];
      }
      return total;
    };
    if (lo_ == 0) {
      slopes_for(0.0);  // symmetry node: no flux enters through r = 0
    } else {
      // Both ends Dirichlet: choose the inflow c so that the slopes integrate to zero.
      double a = *std::min_element(cum.begin(), cum.end());
      double z = *std::max_element(cum.begin(), cum.end());
      for (int it = 0; it < 200 && a < z; ++it) {
        const double mid = 0.5 * (a + z);
        if (mid <= a || mid >= z) break;
        (slopes_for(mid) < 0.0 ? a : z) = mid;
      }
      slopes_for(0.5 * (a + z));
    }
    std::vector<double> u(nodes, 0.0);
    for (std::size_t e = edges; e-- > lo_;) u[e] = u[e + 1] - mesh_.spacing * slope[e];
    return u;
  }

  /// Backtracking along dir; returns the accepted step or 0 when no step is acceptable.
  double line_search(std::vector<double>& u, const std::vector<double>& dir, const std::vector<double>& grad,
                     double res, std::vector<double>& trial, std::vector<double>& scratch) const {
    double slope = 0.0;
    for (std::size_t i = lo_; i < hi_; ++i) slope += grad[i] * dir[i];
    if (!(slope < 0.0)) return 0.0;
    const double j0 = energy(u);
    double alpha = 1.0;
    for (std::size_t bt = 0; bt <= opts_.max_backtracks; ++bt, alpha *= opts_.backtrack) {
      for (std::size_t i = lo_; i < hi_; ++i) trial[i] = u[i] + alpha * dir[i];
      const double j1 = energy(trial);
      if (!std::isfinite(j1)) continue;
      bool accept = j1 <= j0 + opts_.armijo * alpha * slope;
      if (std::abs(j1 - j0) <= 1e-13 * (std::abs(j0) + std::abs(alpha * slope))) {
        // Energy differences are at rounding level and cannot rank the two points.
        accept = gradient(trial, scratch) < res;
      }
      if (accept) {
        u.swap(trial);
        std::copy(u.begin(), u.end(), trial.begin());
        return alpha;
      }
    }
    return 0.0;
  }

  /// Damped Newton from u; returns true when the target is met. Leaves grad holding
  /// the gradient at the final u.
  bool newton(std::vector<double>& u, std::vector<double>& grad, double& res, double target,
              SolveStats& stats) const {
    const std::size_t n = hi_ - lo_;
    std::vector<double> dir(mesh_.node_count(), 0.0);
    std::vector<double> trial = u;
    std::vector<double> scratch(mesh_.node_count(), 0.0);
    std::vector<double> step(n);
    Tridiagonal jac;

    res = gradient(u, grad, &jac);
    bool converged = res <= target;
    std::size_t polish = converged ? 0 : 2;
    std::size_t budget = opts_.max_newton;
    while (budget > 0) {
      if (converged) {
        if (polish == 0) break;
        --polish;
      }
      --budget;
      ++stats.newton_iterations;
      for (std::size_t k = 0; k < n; ++k) step[k] = -grad[lo_ + k];
      if (!solve_tridiagonal(jac, step)) break;
      for (std::size_t k = 0; k < n; ++k) dir[lo_ + k] = step[k];

      if (converged) {
        // Polishing: full step, kept only if the residual improves.
        for (std::size_t i = lo_; i < hi_; ++i) trial[i] = u[i] + dir[i];
        if (!(gradient(trial, scratch) < res)) break;
        u.swap(trial);
        std::copy(u.begin(), u.end(), trial.begin());
        res = gradient(u, grad, &jac);
        continue;
      }
      if (line_search(u, dir, grad, res, trial, scratch) == 0.0) break;
      res = gradient(u, grad, &jac);
      converged = res <= target;
      if (converged) polish = 2;
    }
    if (converged) gradient(u, grad);
    return converged;
  }

  /// Residual noise from rounding the node values: near critical points with p < 2 the
  /// flux derivative is large and amplifies the last-bit error of every difference.
  double rounding_floor(const std::vector<double>& u) const {
    std::vector<double> scratch(mesh_.node_count(), 0.0);
    Tridiagonal jac;
    detail::weighted_operator(mesh_, u, p_, scratch, &jac);
    double floor = 0.0;
    for (std::size_t i = lo_; i < hi_; ++i) {
      const double mag = std::max({std::abs(u[i - (i > 0 ? 1 : 0)]), std::abs(u[i]), std::abs(u[i + 1])});
      floor = std::max(floor, 4.0 * std::numeric_limits<double>::epsilon() * jac.diag[i - lo_] * mag);
    }
    return floor;
  }

  std::vector<double> run(std::vector<double> u, bool from_integral, double target, SolveStats& stats) const {
    const std::size_t n = hi_ - lo_;
    std::vector<double> grad(mesh_.node_count(), 0.0);
    double res = 0.0;
    if (newton(u, grad, res, target, stats)) {
      stats.residual = res;
      return u;
    }
    if (!from_integral) {
      stats.restarted = true;
      std::vector<double> fresh = flux_integral_start();
      std::vector<double> fresh_grad(mesh_.node_count(), 0.0);
      double fresh_res = 0.0;
      if (newton(fresh, fresh_grad, fresh_res, target, stats)) {
        stats.residual = fresh_res;
        return fresh;
      }
      if (fresh_res < res) {
        u.swap(fresh);
        grad.swap(fresh_grad);
        res = fresh_res;
      }
    }

    // Laplacian-preconditioned gradient steps.
    const Tridiagonal lap = laplacian_matrix(mesh_);
    std::vector<double> dir(mesh_.node_count(), 0.0);
    std::vector<double> trial = u;
    std::vector<double> scratch(mesh_.node_count(), 0.0);
    std::vector<double> step(n);
    for (std::size_t it = 0; it < opts_.picard_steps && res > target; ++it) {
      ++stats.fallback_steps;
      for (std::size_t k = 0; k < n; ++k) step[k] = -grad[lo_ + k];
      if (!solve_tridiagonal(lap, step)) break;
      for (std::size_t k = 0; k < n; ++k) dir[lo_ + k] = step[k];
      if (line_search(u, dir, grad, res, trial, scratch) == 0.0) break;
      res = gradient(u, grad);
    }
    stats.residual = res;
    if (res > target) {
      const double floor = rounding_floor(u);
      if (res <= floor) {
        stats.target = floor;
        return u;
      }
      throw SolverFailure("p-Laplacian Dirichlet solve did not reach the residual target (" + std::to_string(res) +
                              " > " + std::to_string(target) + ")",
                          res, stats.newton_iterations + stats.fallback_steps);
    }
    return u;
  }

 private:
  const Mesh& mesh_;
  PValue p_;
  std::vector<double> b_;
  const SolveOptions& opts_;
  std::size_t lo_;
  std::size_t hi_;
};

}  // namespace

double residual_floor(const Mesh& mesh, PValue p, double total_source) {
  return 16.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(mesh.free_count()) *
         std::max(1.0, p.value() - 1.0) * total_source;
}

GridFunction solve_S(const SingularRHS& g, PValue p, const SolveOptions& opts, SolveStats* stats) {
  const Mesh& mesh = g.values().mesh();
  std::vector<double> b(mesh.node_count(), 0.0);
  double ref = 0.0;
  double total = 0.0;
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    b[i] = g.values()[i] * mesh.weights[i];
    ref = std::max(ref, std::abs(b[i]));
    total += std::abs(b[i]);
  }
  SolveStats local;
  SolveStats& st = stats != nullptr ? *stats : local;
  st = SolveStats{};
  if (ref == 0.0) return GridFunction::zeros(g.mesh_ptr());

  // Relative floor so that tiny right-hand sides are still resolved.
  st.target = std::max(std::min(opts.tolerance_for(p), opts.rel_target * ref), residual_floor(mesh, p, total));
  EnergySolver solver(mesh, p, std::move(b), opts);

  std::vector<double> u;
  bool from_integral = false;
  if (!opts.start.empty()) {
    if (opts.start.size() != mesh.node_count()) throw InvalidArgument("solve_S: start vector has wrong size");
    u = opts.start;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (mesh.is_dirichlet(i)) u[i] = 0.0;
    }
  } else if (opts.initial == InitialGuess::Zero) {
    u.assign(mesh.node_count(), 0.0);
  } else if (opts.initial == InitialGuess::ScaledPoisson) {
    u = solver.scaled_poisson_start();
  } else {
    u = solver.flux_integral_start();
    from_integral = true;
  }
  u = solver.run(std::move(u), from_integral, st.target, st);
  return GridFunction(g.mesh_ptr(), std::move(u), true);
}

GridFunction cutoff_rhs(const GridFunction& g, const GridFunction& g_tilde, double eps) {
  if (g.size() != g_tilde.size()) throw InvalidArgument("cutoff_rhs: size mismatch");
  const GridFunction d = distance_field(g.mesh_ptr());
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = d[i] > eps ? g[i] : g_tilde[i];
  return g.with_values(std::move(out), false);
}

GridFunction solve_cutoff(const SingularRHS& g, const GridFunction& g_tilde, double eps, PValue p,
                          const SolveOptions& opts) {
  if (!(eps >= 0.0)) throw InvalidArgument("solve_cutoff: eps must be >= 0");
  return solve_S(SingularRHS::fit(cutoff_rhs(g.values(), g_tilde, eps), g.beta()), p, opts);
}

double find_eps0(const SingularRHS& g, const GridFunction& g_tilde, PValue p, const SolveOptions& opts) {
  const Mesh& mesh = g.values().mesh();
  bool nonzero = false;
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    if (g.values()[i] < 0.0) throw InvalidArgument("find_eps0: g must be nonnegative");
    nonzero = nonzero || g.values()[i] > 0.0;
  }
  if (!nonzero) throw InvalidArgument("find_eps0: g must not vanish identically");

  const GridFunction u = solve_S(g, p, opts);
  const GridFunction d = distance_field(g.mesh_ptr());
  const double dmax = d.sup_norm();
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) dmin = std::min(dmin, d[i]);

  // eps grid from the largest power of two <= max d down past the smallest node distance,
  // where the cutoff region is empty.
  std::vector<double> grid;
  for (double eps = std::exp2(std::floor(std::log2(dmax))); eps >= 0.5 * dmin; eps *= 0.5) grid.push_back(eps);

  auto qualifies = [&](double eps) {
    const GridFunction ue = solve_cutoff(g, g_tilde, eps, p, opts);
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (ue[i] < 0.5 * u[i]) return false;
    }
    return true;
  };

  // Scan from the smallest eps upward; the answer is the end of the qualifying run.
  double best = 0.0;
  for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
    if (!qualifies(*it)) break;
    best = *it;
  }
  if (best == 0.0) throw ThresholdNotFound("find_eps0: no dyadic eps satisfies u_eps >= u/2");
  return best;
}

}  // namespace singlap
