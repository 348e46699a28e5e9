#include "singlap/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "singlap/dirichlet.hpp"
#include "singlap/errors.hpp"

namespace singlap {

GridFunction solve_singular_phi(double m, double beta, PValue p, const MeshPtr& mesh,
                                const SingularPhiOptions& opts) {
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("solve_singular_phi: m must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("solve_singular_phi: beta must lie in (0,1)");
  const std::size_t lo = mesh->free_begin();
  const std::size_t hi = mesh->free_end();
  const double theta = 1.0 / (1.0 + beta / (p.value() - 1.0));

  SolveOptions inner;
  inner.rel_target = opts.rel_target;
  GridFunction u = solve_S(SingularRHS::fit(GridFunction::constant(mesh, m), beta), p, inner);
  std::vector<double> rhs(mesh->node_count(), 0.0);
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    for (std::size_t i = lo; i < hi; ++i) rhs[i] = m / std::pow(std::max(u[i], opts.u_floor), beta);
    inner.start.assign(u.values().begin(), u.values().end());
    const GridFunction t = solve_S(SingularRHS::fit(GridFunction(mesh, rhs, false), beta), p, inner);
    std::vector<double> next(mesh->node_count(), 0.0);
    double step = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      next[i] = std::pow(std::max(u[i], 0.0), 1.0 - theta) * std::pow(std::max(t[i], 0.0), theta);
      step = std::max(step, std::abs(next[i] - u[i]));
    }
    u = GridFunction(mesh, std::move(next), true);
    if (step <= opts.tol * u.sup_norm()) return u;
  }
  throw SolverFailure("solve_singular_phi: iteration did not settle", 0.0, opts.max_iter);
}

LowerConstants lower_constants(const AssumptionReport& report, PValue p, double c1, double eps_cut) {
  if (!(c1 > 0.0) || !(eps_cut > 0.0)) throw InvalidArgument("lower_constants: c1 and eps_cut must be positive");
  const double pm1 = p.value() - 1.0;
  const double beta = report.beta;
  LowerConstants k;
  k.r = 1.0 / (p.value() + beta - 1.0);
  k.delta = std::pow(report.a_const, pm1 / (beta - 1.0 + p.value()));
  k.gamma = std::exp2(beta) * report.b_const * std::pow(k.delta, -beta / pm1);
  k.lambda_star = std::pow(2.0 * report.A / (c1 * eps_cut * std::pow(k.delta, 1.0 / pm1)), 1.0 / k.r);
  return k;
}

namespace {

SolveOptions barrier_solve_options() {
  SolveOptions o;
  o.rel_target = 1e-9;
  return o;
}

std::vector<double> phi_power(const GridFunction& phi, double beta, double scale) {
  const Mesh& mesh = phi.mesh();
  std::vector<double> out(phi.size(), 0.0);
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) out[i] = scale / std::pow(phi[i], beta);
  return out;
}

}  // namespace

GridFunction build_psi(double delta, double gamma, double beta, double eps_cut, const GridFunction& phi, PValue p,
                       PsiMargins* margins) {
  if (!(delta > 0.0) || !(gamma >= 0.0)) throw InvalidArgument("build_psi: need delta > 0, gamma >= 0");
  const Mesh& mesh = phi.mesh();
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    if (!(phi[i] > 0.0)) throw InvalidArgument("build_psi: phi must be positive at free nodes");
  }
  const GridFunction g(phi.mesh_ptr(), phi_power(phi, beta, delta), false);
  const GridFunction g_tilde(phi.mesh_ptr(), phi_power(phi, beta, -gamma), false);
  GridFunction psi = solve_cutoff(SingularRHS::fit(g, beta), g_tilde, eps_cut, p, barrier_solve_options());

  const double top = std::pow(delta, 1.0 / (p.value() - 1.0));
  PsiMargins m{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  std::size_t bad_lower = mesh.node_count();
  std::size_t bad_upper = mesh.node_count();
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    const double lower = psi[i] - 0.5 * top * phi[i];
    const double upper = top * phi[i] - psi[i];
    if (lower < m.lower) m.lower = lower;
    if (upper < m.upper) m.upper = upper;
    if (lower <= 0.0 && bad_lower == mesh.node_count()) bad_lower = i;
    if (upper < 0.0 && bad_upper == mesh.node_count()) bad_upper = i;
  }
  if (margins != nullptr) *margins = m;
  if (bad_lower != mesh.node_count()) {
    throw BarrierConstructionError("build_psi: psi >= delta^{1/(p-1)} phi / 2 fails at node " +
                                       std::to_string(bad_lower),
                                   bad_lower, m.lower);
  }
  if (bad_upper != mesh.node_count()) {
    throw BarrierConstructionError("build_psi: psi <= delta^{1/(p-1)} phi fails at node " + std::to_string(bad_upper),
                                   bad_upper, m.upper);
  }
  return psi;
}

BarrierPack build_barriers(const AssumptionReport& report, PValue p, const MeshPtr& mesh, const EigenPair& eigen,
                           const BarrierOptions& opts) {
  if (!report.passed()) {
    const HypothesisCheck* bad = report.first_failure();
    throw InvalidArgument("build_barriers: assumption check '" + bad->name + "' failed");
  }
  BarrierPack pack;
  pack.beta = report.beta;
  pack.phi = solve_singular_phi(1.0, report.beta, p, mesh, opts.phi);
  const GridFunction d = distance_field(mesh);
  pack.c1 = comparability_constants(pack.phi, d).c1;
  pack.eps_m = comparability_constants(pack.phi, eigen.phi1).c1;

  // delta and gamma do not depend on the cutoff; eps0 comes from the psi problem itself.
  const LowerConstants base = lower_constants(report, p, pack.c1, 1.0);
  pack.delta = base.delta;
  pack.gamma = base.gamma;
  pack.r = base.r;
  const GridFunction g(mesh, phi_power(pack.phi, pack.beta, pack.delta), false);
  const GridFunction g_tilde(mesh, phi_power(pack.phi, pack.beta, -pack.gamma), false);
  pack.eps0 = find_eps0(SingularRHS::fit(g, pack.beta), g_tilde, p, barrier_solve_options());

  double eps = opts.cut_fraction * pack.eps0;
  for (std::size_t k = 0;; ++k) {
    try {
      pack.psi = build_psi(pack.delta, pack.gamma, pack.beta, eps, pack.phi, p, &pack.margins);
      pack.shrinks = k;
      break;
    } catch (const BarrierConstructionError&) {
      if (k >= opts.max_shrinks) throw;
      eps *= 0.5;
    }
  }
  pack.eps_cut = eps;
  pack.lambda_star = lower_constants(report, p, pack.c1, eps).lambda_star;
  return pack;
}

GridFunction lower_solution(double lambda, const BarrierPack& pack) {
  if (!(lambda >= pack.lambda_star)) {
    throw DomainError("lambda below lambda_star (" + std::to_string(lambda) + " < " +
                      std::to_string(pack.lambda_star) + ")");
  }
  const double scale = std::pow(lambda, pack.r);
  std::vector<double> v(pack.psi.values().begin(), pack.psi.values().end());
  for (double& x : v) x *= scale;
  return pack.psi.with_values(std::move(v), true);
}

double interior_excess(const BarrierPack& pack, double lambda, double A) {
  const GridFunction u = lower_solution(lambda, pack);
  const GridFunction d = distance_field(pack.psi.mesh_ptr());
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (d[i] > pack.eps_cut) m = std::min(m, u[i] - A);
  }
  return m;
}

UpperPack upper_constants(double Lambda, const AssumptionReport& report, const Nonlinearity& f, double h_sup,
                          const BarrierPack& pack, PValue p) {
  if (!(Lambda >= pack.lambda_star)) throw DomainError("upper_constants: Lambda below lambda_star");
  if (!(h_sup >= 0.0)) throw InvalidArgument("upper_constants: h_sup must be >= 0");
  const double pm1 = p.value() - 1.0;
  const double beta = report.beta;
  const double phi_sup = pack.phi.sup_norm();
  UpperPack up;
  up.Lambda = Lambda;
  up.eps_bar = 1.0 / (8.0 * Lambda * std::pow(phi_sup, pm1 + beta));
  const GrowthBounds g = growth_bounds(f, p, beta, Lambda, up.eps_bar);
  up.A1 = g.A1;
  up.C = g.C;
  up.M_terms = {std::pow(Lambda, pack.r) * std::pow(pack.delta, 1.0 / pm1),
                std::pow(4.0 * Lambda * up.C, 1.0 / (p.value() + beta - 1.0)),
                std::pow(4.0 * h_sup * std::pow(phi_sup, beta), 1.0 / pm1)};
  up.M_const = *std::max_element(up.M_terms.begin(), up.M_terms.end());
  std::vector<double> v(pack.phi.values().begin(), pack.phi.values().end());
  for (double& x : v) x *= up.M_const;
  up.u_upper = pack.phi.with_values(std::move(v), true);
  return up;
}

namespace {

MarginReport verify(const GridFunction& u, double lambda, const Nonlinearity& f, const GridFunction& h, PValue p,
                    double sign) {
  const Mesh& mesh = u.mesh();
  if (h.size() != u.size()) throw InvalidArgument("verify: h lives on a different mesh");
  std::vector<double> op(mesh.node_count());
  detail::weighted_operator(mesh, u.values(), p, op);
  MarginReport rep;
  rep.passed = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  double worst_scaled = std::numeric_limits<double>::infinity();
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    if (!(u[i] > 0.0)) throw InvalidArgument("verify: u must be positive at free nodes");
    const double source = mesh.weights[i] * (lambda * f(u[i]) + h[i]);
    const double margin = sign * (source - op[i]);
    const double slack = 1e-7 * (std::abs(source) + std::abs(op[i])) + 1e-300;
    if (margin < -slack) rep.passed = false;
    // Rank nodes by margin relative to their slack so the report shows the tightest one.
    const double scaled = margin / slack;
    if (scaled < worst_scaled) {
      worst_scaled = scaled;
      rep.worst_margin = margin;
      rep.worst_node = i;
      rep.slack = slack;
    }
  }
  return rep;
}

}  // namespace

MarginReport verify_subsolution(const GridFunction& u_low, double lambda, const Nonlinearity& f,
                                const GridFunction& h, PValue p) {
  return verify(u_low, lambda, f, h, p, 1.0);
}

MarginReport verify_supersolution(const GridFunction& u_up, double lambda, const Nonlinearity& f,
                                  const GridFunction& h, PValue p) {
  return verify(u_up, lambda, f, h, p, -1.0);
}

}  // namespace singlap
