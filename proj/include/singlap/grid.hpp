#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace singlap {

enum class MeshKind { Interval, Radial };

/// Uniform node grid on the unit interval or on the radial section [0, R] of an N-ball.
///
/// Nodes are numbered 0..n_interior+1. The last node is always a Dirichlet node.
/// For the interval the first node is Dirichlet as well; for the radial grid it is
/// the symmetry node r = 0 and carries an unknown.
///
/// Edge e joins nodes e and e+1. `face_area[e]` is the measure of the sphere at the
/// edge midpoint (1 for the interval) and `edge_weights[e] = face_area[e] * spacing`
/// is the quadrature weight of the edge in gradient integrals. `weights[i]` is the
/// measure of the dual cell of node i, so the node weights sum to the measure of
/// the domain.
struct Mesh {
  MeshKind kind = MeshKind::Interval;
  std::size_t n_interior = 0;
  double spacing = 0.0;
  int dim = 1;
  double radius = 1.0;
  std::vector<double> coords;
  std::vector<double> weights;
  std::vector<double> face_area;
  std::vector<double> edge_weights;

  std::size_t node_count() const noexcept { return coords.size(); }
  std::size_t edge_count() const noexcept { return face_area.size(); }
  /// First node carrying an unknown.
  std::size_t free_begin() const noexcept { return kind == MeshKind::Interval ? 1 : 0; }
  /// One past the last node carrying an unknown.
  std::size_t free_end() const noexcept { return n_interior + 1; }
  std::size_t free_count() const noexcept { return free_end() - free_begin(); }
  bool is_dirichlet(std::size_t i) const noexcept { return i < free_begin() || i >= free_end(); }
  /// Length of the interval or volume of the ball.
  double measure() const;
};

using MeshPtr = std::shared_ptr<const Mesh>;

MeshPtr build_interval_mesh(std::size_t n_interior);
MeshPtr build_radial_mesh(std::size_t n_interior, int dim, double radius);

/// Surface measure of the unit sphere S^{N-1} (2 for N = 1).
double unit_sphere_area(int dim);

/// Nodal values on a mesh. Immutable; Dirichlet-flagged functions vanish at Dirichlet nodes.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(MeshPtr mesh, std::vector<double> values, bool dirichlet = true);

  static GridFunction zeros(MeshPtr mesh, bool dirichlet = true);
  static GridFunction constant(MeshPtr mesh, double value);

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const noexcept { return mesh_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  bool dirichlet() const noexcept { return dirichlet_; }

  /// Same mesh, new values. Dirichlet-flagged results get their boundary values zeroed.
  GridFunction with_values(std::vector<double> values, bool dirichlet = true) const;

  /// max over all nodes of |values|.
  double sup_norm() const;

 private:
  MeshPtr mesh_;
  std::vector<double> values_;
  bool dirichlet_ = true;
};

/// d(x) = dist(x, boundary): min(x, 1-x) on the interval, R - r on the ball.
GridFunction distance_field(const MeshPtr& mesh);

/// Sup norm of a - b over all nodes; both must live on the same mesh.
double sup_distance(const GridFunction& a, const GridFunction& b);

}  // namespace singlap
