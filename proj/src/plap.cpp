#include "singlap/plap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "singlap/errors.hpp"
#include "singlap/simd/kernels.hpp"

namespace singlap {

PValue::PValue(double p) : p_(p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw InvalidArgument("p must satisfy 1 < p < infinity, got " + std::to_string(p));
  }
}

namespace detail {

void weighted_operator(const Mesh& mesh, std::span<const double> u, PValue p, std::span<double> out,
                       Tridiagonal* jac, double jac_shift_rel) {
  const std::size_t edges = mesh.edge_count();
  const auto fp = simd::make_flux_params(p.value(), mesh.spacing, p.regularization());
  std::vector<double> flux(edges);
  std::vector<double> dflux(jac != nullptr ? edges : 0);
  simd::active_kernels().edge_flux(u, fp, flux, dflux);

  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t lo = mesh.free_begin();
  const std::size_t hi = mesh.free_end();
  for (std::size_t i = lo; i < hi; ++i) {
    const double left = i > 0 ? mesh.face_area[i - 1] * flux[i - 1] : 0.0;
    const double right = mesh.face_area[i] * flux[i];
    out[i] = left - right;
  }
  if (jac == nullptr) return;

  if (jac_shift_rel > 0.0) {
    const double top = *std::max_element(dflux.begin(), dflux.end());
    const double shift = top > 0.0 ? jac_shift_rel * top : 1.0;
    for (double& v : dflux) v += shift;
  }
  const std::size_t n = hi - lo;
  *jac = Tridiagonal(n);
  const double inv_h = 1.0 / mesh.spacing;
  for (std::size_t i = lo; i < hi; ++i) {
    const std::size_t k = i - lo;
    const double kl = i > 0 ? mesh.face_area[i - 1] * dflux[i - 1] * inv_h : 0.0;
    const double kr = mesh.face_area[i] * dflux[i] * inv_h;
    jac->diag[k] = kl + kr;
    if (k + 1 < n) {
      jac->super[k] = -kr;
      jac->sub[k] = -kr;
    }
  }
}

double gradient_energy(const Mesh& mesh, std::span<const double> u, PValue p) {
  const auto fp = simd::make_flux_params(p.value(), mesh.spacing, p.regularization());
  return simd::active_kernels().edge_energy(u, fp, mesh.edge_weights);
}

}  // namespace detail

namespace {

void require_same_mesh(const GridFunction& a, const GridFunction& b, const char* where) {
  if (a.size() != b.size()) {
    throw InvalidArgument(std::string(where) + ": grid functions live on different meshes");
  }
}

}  // namespace

GridFunction apply_p_laplacian(const GridFunction& u, PValue p) {
  const Mesh& mesh = u.mesh();
  std::vector<double> out(mesh.node_count());
  detail::weighted_operator(mesh, u.values(), p, out);
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) out[i] /= mesh.weights[i];
  return GridFunction(u.mesh_ptr(), std::move(out), false);
}

double energy(const GridFunction& u, const GridFunction& g, PValue p) {
  require_same_mesh(u, g, "energy");
  const Mesh& mesh = u.mesh();
  double linear = 0.0;
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) linear += g[i] * u[i] * mesh.weights[i];
  return detail::gradient_energy(mesh, u.values(), p) - linear;
}

ResidualNorms weak_residual_norms(const GridFunction& u, const GridFunction& rhs, PValue p) {
  require_same_mesh(u, rhs, "weak_residual");
  const Mesh& mesh = u.mesh();
  std::vector<double> op(mesh.node_count());
  detail::weighted_operator(mesh, u.values(), p, op);
  ResidualNorms norms;
  double sq = 0.0;
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    const double r = op[i] - rhs[i] * mesh.weights[i];
    norms.max_norm = std::max(norms.max_norm, std::abs(r));
    sq += r * r / mesh.weights[i];
  }
  norms.l2 = std::sqrt(sq);
  return norms;
}

double weak_residual(const GridFunction& u, const GridFunction& rhs, PValue p) {
  return weak_residual_norms(u, rhs, p).max_norm;
}

SimonGap simon_gap(std::span<const double> x, std::span<const double> y, PValue p) {
  if (x.size() != y.size()) throw InvalidArgument("simon_gap: vectors differ in dimension");
  const double pv = p.value();
  double nx = 0.0;
  double ny = 0.0;
  double nd = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    nx += x[k] * x[k];
    ny += y[k] * y[k];
    nd += (x[k] - y[k]) * (x[k] - y[k]);
  }
  nx = std::sqrt(nx);
  ny = std::sqrt(ny);
  nd = std::sqrt(nd);
  const double sx = nx > 0.0 ? std::pow(nx, pv - 2.0) : 0.0;
  const double sy = ny > 0.0 ? std::pow(ny, pv - 2.0) : 0.0;
  SimonGap gap;
  for (std::size_t k = 0; k < x.size(); ++k) gap.lhs += (sx * x[k] - sy * y[k]) * (x[k] - y[k]);
  gap.rhs_p_ge_2 = std::pow(nd, pv);
  gap.rhs_p_le_2 = gap.rhs_p_ge_2 / std::pow(1.0 + nx + ny, 2.0 - pv);
  return gap;
}

ComparisonReport check_weak_comparison(const GridFunction& u, const GridFunction& v, PValue p, double tol) {
  require_same_mesh(u, v, "check_weak_comparison");
  const Mesh& mesh = u.mesh();
  std::vector<double> lu(mesh.node_count());
  std::vector<double> lv(mesh.node_count());
  detail::weighted_operator(mesh, u.values(), p, lu);
  detail::weighted_operator(mesh, v.values(), p, lv);

  ComparisonReport report;
  report.premise_gap = std::numeric_limits<double>::infinity();
  report.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) {
    report.premise_gap = std::min(report.premise_gap, lv[i] - lu[i]);
  }
  for (std::size_t i = 0; i < mesh.node_count(); ++i) report.margin = std::min(report.margin, v[i] - u[i]);
  report.premise = report.premise_gap >= -tol;
  report.conclusion = report.margin >= -tol;
  report.holds = !report.premise || report.conclusion;
  return report;
}

double hardy_ratio(const GridFunction& u, PValue p) {
  const Mesh& mesh = u.mesh();
  const GridFunction d = distance_field(u.mesh_ptr());
  double num = 0.0;
  for (std::size_t i = mesh.free_begin(); i < mesh.free_end(); ++i) num += std::abs(u[i] / d[i]) * mesh.weights[i];
  double grad = 0.0;
  for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
    const double t = (u[e + 1] - u[e]) / mesh.spacing;
    grad += std::pow(std::abs(t), p.value()) * mesh.edge_weights[e];
  }
  if (grad == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / std::pow(grad, 1.0 / p.value());
}

}  // namespace singlap
