#include "singlap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "singlap/errors.hpp"

namespace singlap {

double unit_sphere_area(int dim) {
  const double half = 0.5 * dim;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double Mesh::measure() const {
  if (kind == MeshKind::Interval) return 1.0;
  return unit_sphere_area(dim) / dim * std::pow(radius, dim);
}

MeshPtr build_interval_mesh(std::size_t n_interior) {
  if (n_interior < 3) {
    throw InvalidMesh("interval mesh needs at least 3 interior nodes, got " + std::to_string(n_interior));
  }
  auto mesh = std::make_shared<Mesh>();
  mesh->kind = MeshKind::Interval;
  mesh->n_interior = n_interior;
  mesh->dim = 1;
  mesh->radius = 1.0;
  const std::size_t nodes = n_interior + 2;
  const double h = 1.0 / static_cast<double>(n_interior + 1);
  mesh->spacing = h;
  mesh->coords.resize(nodes);
  mesh->weights.assign(nodes, h);
  for (std::size_t i = 0; i < nodes; ++i) mesh->coords[i] = static_cast<double>(i) * h;
  mesh->coords.back() = 1.0;
  mesh->weights.front() = 0.5 * h;
  mesh->weights.back() = 0.5 * h;
  mesh->face_area.assign(nodes - 1, 1.0);
  mesh->edge_weights.assign(nodes - 1, h);
  return mesh;
}

MeshPtr build_radial_mesh(std::size_t n_interior, int dim, double radius) {
  if (n_interior < 3) {
    throw InvalidMesh("radial mesh needs at least 3 interior nodes, got " + std::to_string(n_interior));
  }
  if (dim < 1) throw InvalidMesh("radial mesh dimension must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidMesh("radial mesh radius must be positive");

  auto mesh = std::make_shared<Mesh>();
  mesh->kind = MeshKind::Radial;
  mesh->n_interior = n_interior;
  mesh->dim = dim;
  mesh->radius = radius;
  const std::size_t nodes = n_interior + 2;
  const double h = radius / static_cast<double>(n_interior + 1);
  mesh->spacing = h;
  const double area = unit_sphere_area(dim);

  mesh->coords.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) mesh->coords[i] = static_cast<double>(i) * h;
  mesh->coords.back() = radius;

  // Dual-cell volumes; the shell volumes telescope to the exact ball volume.
  auto shell = [&](double lo, double hi) {
    return area / dim * (std::pow(hi, dim) - std::pow(lo, dim));
  };
  mesh->weights.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double lo = i == 0 ? 0.0 : 0.5 * (mesh->coords[i - 1] + mesh->coords[i]);
    const double hi = i + 1 == nodes ? radius : 0.5 * (mesh->coords[i] + mesh->coords[i + 1]);
    mesh->weights[i] = shell(lo, hi);
  }

  mesh->face_area.resize(nodes - 1);
  mesh->edge_weights.resize(nodes - 1);
  for (std::size_t e = 0; e + 1 < nodes; ++e) {
    const double mid = 0.5 * (mesh->coords[e] + mesh->coords[e + 1]);
    mesh->face_area[e] = area * std::pow(mid, dim - 1);
    mesh->edge_weights[e] = mesh->face_area[e] * h;
  }
  return mesh;
}

GridFunction::GridFunction(MeshPtr mesh, std::vector<double> values, bool dirichlet)
    : mesh_(std::move(mesh)), values_(std::move(values)), dirichlet_(dirichlet) {
  if (!mesh_) throw InvalidArgument("grid function needs a mesh");
  if (values_.size() != mesh_->node_count()) {
    throw InvalidArgument("grid function has " + std::to_string(values_.size()) + " values, mesh has " +
                          std::to_string(mesh_->node_count()) + " nodes");
  }
  if (dirichlet_) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (mesh_->is_dirichlet(i) && values_[i] != 0.0) {
        throw InvalidArgument("Dirichlet grid function is nonzero at boundary node " + std::to_string(i));
      }
    }
  }
}

GridFunction GridFunction::zeros(MeshPtr mesh, bool dirichlet) {
  const std::size_t n = mesh->node_count();
  return GridFunction(std::move(mesh), std::vector<double>(n, 0.0), dirichlet);
}

GridFunction GridFunction::constant(MeshPtr mesh, double value) {
  const std::size_t n = mesh->node_count();
  return GridFunction(std::move(mesh), std::vector<double>(n, value), false);
}

GridFunction GridFunction::with_values(std::vector<double> values, bool dirichlet) const {
  if (dirichlet && values.size() == mesh_->node_count()) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (mesh_->is_dirichlet(i)) values[i] = 0.0;
    }
  }
  return GridFunction(mesh_, std::move(values), dirichlet);
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

GridFunction distance_field(const MeshPtr& mesh) {
  std::vector<double> d(mesh->node_count());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double x = mesh->coords[i];
    d[i] = mesh->kind == MeshKind::Interval ? std::min(x, 1.0 - x) : mesh->radius - x;
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (mesh->is_dirichlet(i)) d[i] = 0.0;
  }
  return GridFunction(mesh, std::move(d), true);
}

double sup_distance(const GridFunction& a, const GridFunction& b) {
  if (a.size() != b.size()) throw InvalidArgument("sup_distance: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace singlap
