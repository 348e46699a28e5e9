#include "singlap/properties.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "singlap/errors.hpp"

namespace singlap {

double SampleRng::uniform(double lo, double hi) {
  const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

SimonSweep simon_sweep(PValue p, std::uint64_t seed, std::size_t count, double constant, std::size_t dim) {
  if (dim == 0) throw InvalidArgument("simon_sweep: dimension must be positive");
  SampleRng rng(seed);
  SimonSweep out;
  out.constant = constant;
  out.min_ratio = INFINITY;
  std::vector<double> x(dim);
  std::vector<double> y(dim);
  for (std::size_t k = 0; k < count; ++k) {
    for (std::size_t j = 0; j < dim; ++j) x[j] = rng.uniform(-10.0, 10.0);
    for (std::size_t j = 0; j < dim; ++j) y[j] = rng.uniform(-10.0, 10.0);
    const SimonGap gap = simon_gap(x, y, p);
    const double rhs = p.value() >= 2.0 ? gap.rhs_p_ge_2 : gap.rhs_p_le_2;
    ++out.samples;
    if (rhs <= 0.0) continue;
    out.min_ratio = std::min(out.min_ratio, gap.lhs / rhs);
    if (gap.lhs < constant * rhs * (1.0 - 1e-12)) ++out.violations;
  }
  return out;
}

double hardy_sharp_constant(PValue p, const MeshPtr& mesh) {
  const Mesh& m = *mesh;
  const GridFunction d = distance_field(mesh);
  std::vector<double> g(m.node_count(), 0.0);
  for (std::size_t i = m.free_begin(); i < m.free_end(); ++i) g[i] = 1.0 / d[i];
  SolveOptions opts;
  opts.rel_target = 1e-10;
  const GridFunction v = solve_S(SingularRHS::fit(GridFunction(mesh, g, false), 0.999), p, opts);
  double pairing = 0.0;
  for (std::size_t i = m.free_begin(); i < m.free_end(); ++i) pairing += g[i] * v[i] * m.weights[i];
  return std::pow(pairing, (p.value() - 1.0) / p.value());
}

GridFunction random_dirichlet(const MeshPtr& mesh, SampleRng& rng) {
  const Mesh& m = *mesh;
  const GridFunction d = distance_field(mesh);
  const double dmax = d.sup_norm();
  std::vector<double> u(m.node_count(), 0.0);
  const auto shape = rng.next() % 3;
  if (shape == 0) {
    double amp[6];
    for (double& a : amp) a = rng.uniform(-1.0, 1.0);
    for (std::size_t i = m.free_begin(); i < m.free_end(); ++i) {
      const double t = d[i] / dmax;
      double s = 0.0;
      for (int k = 0; k < 6; ++k) s += amp[k] * std::sin((k + 1) * M_PI * 0.5 * t) / (k + 1);
      u[i] = s;
    }
  } else if (shape == 1) {
    for (std::size_t i = m.free_begin(); i < m.free_end(); ++i) u[i] = rng.uniform(-1.0, 1.0);
  } else {
    const double power = rng.uniform(0.5, 3.0);
    const double scale = rng.uniform(0.1, 10.0);
    for (std::size_t i = m.free_begin(); i < m.free_end(); ++i) u[i] = scale * std::pow(d[i] / dmax, power);
  }
  return GridFunction(mesh, std::move(u), true);
}

HardySweep hardy_sweep(PValue p, const MeshPtr& mesh, std::uint64_t seed, std::size_t count, double constant) {
  SampleRng rng(seed);
  HardySweep out;
  out.constant = constant;
  for (std::size_t k = 0; k < count; ++k) {
    const double r = hardy_ratio(random_dirichlet(mesh, rng), p);
    ++out.samples;
    out.max_ratio = std::max(out.max_ratio, r);
    if (r > constant) ++out.violations;
  }
  return out;
}

SingularRHS random_singular_rhs(double C, double beta, const MeshPtr& mesh, SampleRng& rng) {
  const Mesh& m = *mesh;
  const GridFunction d = distance_field(mesh);
  double amp[4];
  double phase[4];
  for (int k = 0; k < 4; ++k) {
    amp[k] = rng.uniform(-1.0, 1.0);
    phase[k] = rng.uniform(0.0, 2.0 * M_PI);
  }
  const double noise = rng.uniform(0.0, 0.5);
  std::vector<double> g(m.node_count(), 0.0);
  for (std::size_t i = m.free_begin(); i < m.free_end(); ++i) {
    double s = noise * rng.uniform(-1.0, 1.0);
    for (int k = 0; k < 4; ++k) s += amp[k] * std::sin((k + 1) * M_PI * m.coords[i] + phase[k]);
    g[i] = C * std::clamp(s, -1.0, 1.0) / std::pow(d[i], beta);
  }
  return SingularRHS(GridFunction(mesh, std::move(g), false), C, beta);
}

ComparisonSweep comparison_sweep(PValue p, const MeshPtr& mesh, std::uint64_t seed, std::size_t count, double tol) {
  const Mesh& m = *mesh;
  const GridFunction d = distance_field(mesh);
  SampleRng rng(seed);
  SolveOptions opts;
  opts.rel_target = 1e-12;
  ComparisonSweep out;
  for (std::size_t k = 0; k < count; ++k) {
    const SingularRHS g1 = random_singular_rhs(1.0, 0.5, mesh, rng);
    std::vector<double> g2(g1.values().values().begin(), g1.values().values().end());
    const double base = rng.uniform(0.05, 1.0);
    for (std::size_t i = m.free_begin(); i < m.free_end(); ++i) g2[i] += base * rng.uniform(0.05, 1.0) / std::sqrt(d[i]);
    const GridFunction u1 = solve_S(g1, p, opts);
    const GridFunction u2 = solve_S(SingularRHS::fit(GridFunction(mesh, std::move(g2), false), 0.5), p, opts);
    double worst = -INFINITY;
    for (std::size_t i = 0; i < m.node_count(); ++i) worst = std::max(worst, u1[i] - u2[i]);
    ++out.samples;
    out.max_violation = std::max(out.max_violation, worst);
    if (worst > tol) ++out.violations;
  }
  return out;
}

double gradient_sup(const GridFunction& u) {
  const Mesh& m = u.mesh();
  double g = 0.0;
  for (std::size_t e = 0; e < m.edge_count(); ++e) g = std::max(g, std::abs(u[e + 1] - u[e]) / m.spacing);
  return g;
}

UniformBound uniform_bound(double C, double beta, PValue p, const MeshPtr& mesh) {
  const Mesh& m = *mesh;
  if (m.kind != MeshKind::Interval) throw InvalidArgument("uniform_bound: interval meshes only");
  const GridFunction d = distance_field(mesh);
  std::vector<double> g(m.node_count(), 0.0);
  double total = 0.0;
  for (std::size_t i = m.free_begin(); i < m.free_end(); ++i) {
    g[i] = C / std::pow(d[i], beta);
    total += g[i] * m.weights[i];
  }
  SolveOptions opts;
  opts.rel_target = 1e-10;
  const GridFunction env = solve_S(SingularRHS(GridFunction(mesh, std::move(g), false), C, beta), p, opts);
  UniformBound out;
  out.sup_bound = env.sup_norm();
  out.grad_bound = std::pow(total, 1.0 / (p.value() - 1.0));
  for (std::size_t i = m.free_begin(); i < m.free_end(); ++i) out.c_prime = std::max(out.c_prime, env[i] / d[i]);
  return out;
}

BoundSweep singular_rhs_sweep(double C, double beta, PValue p, const MeshPtr& mesh, std::uint64_t seed,
                              std::size_t count) {
  const Mesh& m = *mesh;
  const GridFunction d = distance_field(mesh);
  SampleRng rng(seed);
  BoundSweep out;
  for (std::size_t k = 0; k < count; ++k) {
    const GridFunction u = solve_S(random_singular_rhs(C, beta, mesh, rng), p);
    ++out.samples;
    out.max_sup = std::max(out.max_sup, u.sup_norm());
    out.max_grad = std::max(out.max_grad, gradient_sup(u));
    for (std::size_t i = m.free_begin(); i < m.free_end(); ++i) {
      out.max_over_d = std::max(out.max_over_d, std::abs(u[i]) / d[i]);
    }
  }
  return out;
}

}  // namespace singlap
