#include "singlap/eigenpair.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "singlap/dirichlet.hpp"
#include "singlap/errors.hpp"

namespace singlap {

namespace {

std::vector<double> signed_power(std::span<const double> u, double exponent) {
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::copysign(std::pow(std::abs(u[i]), exponent), u[i]);
  return out;
}

void normalize_max(std::vector<double>& u) {
  double top = 0.0;
  for (double v : u) top = std::max(top, std::abs(v));
  if (!(top > 0.0)) throw SolverFailure("first_eigenpair: iterate collapsed to zero", 0.0, 0);
  for (double& v : u) v /= top;
}

}  // namespace

double rayleigh_quotient(const GridFunction& u, PValue p) {
  const Mesh& mesh = u.mesh();
  double top = 0.0;
  for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
    const double t = (u[e + 1] - u[e]) / mesh.spacing;
    top += std::pow(std::abs(t), p.value()) * mesh.edge_weights[e];
  }
  double bottom = 0.0;
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    bottom += std::pow(std::abs(u[i]), p.value()) * mesh.weights[i];
  }
  if (!(bottom > 0.0)) throw InvalidArgument("rayleigh_quotient: u vanishes");
  return top / bottom;
}

EigenPair first_eigenpair(PValue p, const MeshPtr& mesh, const EigenOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("first_eigenpair: tol must be positive");
  const double pm1 = p.value() - 1.0;
  std::vector<double> u;
  if (opts.start.empty()) {
    const GridFunction d = distance_field(mesh);
    u.assign(d.values().begin(), d.values().end());
  } else {
    if (opts.start.size() != mesh->node_count()) throw InvalidArgument("first_eigenpair: start has wrong size");
    u = opts.start;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (mesh->is_dirichlet(i)) u[i] = 0.0;
    }
  }
  normalize_max(u);

  EigenPair pair;
  SolveOptions inner;
  // Inner solves are held well below the outer tolerance.
  inner.tol_residual = std::min(SolveOptions{}.tolerance_for(p), 1e-3 * opts.tol);
  double residual = std::numeric_limits<double>::infinity();
  double scale = 0.0;  // S(u^{p-1}) ~ u / lambda^{1/(p-1)}; reused as a warm start
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    GridFunction rhs(mesh, signed_power(u, pm1), false);
    if (scale > 0.0) {
      inner.start = u;
      for (double& v : inner.start) v *= scale;
    }
    const GridFunction next = solve_S(SingularRHS::fit(rhs), p, inner);
    std::vector<double> w(next.values().begin(), next.values().end());
    double top = 0.0;
    for (double v : w) top = std::max(top, std::abs(v));
    scale = top;
    normalize_max(w);
    u.swap(w);

    const GridFunction phi(mesh, u, true);
    pair.lambda1 = rayleigh_quotient(phi, p);
    std::vector<double> target = signed_power(u, pm1);
    for (double& v : target) v *= pair.lambda1;
    residual = weak_residual(phi, GridFunction(mesh, std::move(target), false), p);
    pair.iterations = it;
    if (residual <= opts.tol) break;
  }
  pair.residual = residual;
  if (!(residual <= opts.tol)) {
    throw SolverFailure("first_eigenpair: eigen residual " + std::to_string(residual) + " above tolerance", residual,
                        pair.iterations);
  }
  for (std::size_t i = mesh->free_begin(); i < mesh->free_end(); ++i) {
    if (!(u[i] > 0.0)) throw SolverFailure("first_eigenpair: iterate lost positivity", residual, pair.iterations);
  }
  pair.phi1 = GridFunction(mesh, u, true);

  const std::size_t last = mesh->node_count() - 1;
  if (mesh->free_begin() == 1) pair.boundary_slopes.push_back((u[0] - u[1]) / mesh->spacing);
  pair.boundary_slopes.push_back((u[last] - u[last - 1]) / mesh->spacing);
  return pair;
}

Comparability comparability_constants(const GridFunction& phi, const GridFunction& d) {
  if (phi.size() != d.size()) throw InvalidArgument("comparability_constants: size mismatch");
  const Mesh& mesh = phi.mesh();
  Comparability c{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    if (!(phi[i] > 0.0)) throw InvalidArgument("comparability_constants: phi must be positive at free nodes");
    const double ratio = phi[i] / d[i];
    c.c1 = std::min(c.c1, ratio);
    c.c2 = std::max(c.c2, ratio);
  }
  return c;
}

}  // namespace singlap
