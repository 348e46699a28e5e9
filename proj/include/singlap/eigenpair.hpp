#pragma once

#include <cstddef>
#include <vector>

#include "singlap/grid.hpp"
#include "singlap/plap.hpp"

namespace singlap {

/// First eigenpair of the discrete p-Laplacian, -Delta_p phi = lambda |phi|^{p-2} phi.
struct EigenPair {
  double lambda1 = 0.0;
  /// Positive at free nodes, max value exactly 1.
  GridFunction phi1;
  /// Outward one-sided difference quotient at each Dirichlet node (all negative).
  std::vector<double> boundary_slopes;
  std::size_t iterations = 0;
  /// Weak residual of the eigen equation at the returned pair.
  double residual = 0.0;
};

struct EigenOptions {
  double tol = 1e-8;
  std::size_t max_iter = 500;
  /// Starting guess; the distance field when empty.
  std::vector<double> start;
};

/// Inverse iteration u <- S(|u|^{p-2} u) with max-normalization; lambda from the
/// Rayleigh quotient sum |Du|^p w_e / sum |u|^p w_i. Throws SolverFailure when the
/// eigen residual does not drop below tol.
EigenPair first_eigenpair(PValue p, const MeshPtr& mesh, const EigenOptions& opts = {});

struct Comparability {
  double c1 = 0.0;  ///< min over free nodes of phi / d
  double c2 = 0.0;  ///< max over free nodes of phi / d
};

/// Requires phi > 0 at free nodes.
Comparability comparability_constants(const GridFunction& phi, const GridFunction& d);

/// Sum |Du|^p w_e / sum |u|^p w_i.
double rayleigh_quotient(const GridFunction& u, PValue p);

}  // namespace singlap
