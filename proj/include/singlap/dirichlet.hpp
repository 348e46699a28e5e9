#pragma once

#include <cstddef>
#include <vector>

#include "singlap/grid.hpp"
#include "singlap/plap.hpp"

namespace singlap {

/// Right-hand side g with |g(x)| <= C / d(x)^beta at every free node.
class SingularRHS {
 public:
  /// Throws InvalidArgument when the weighted bound fails at some free node.
  SingularRHS(GridFunction values, double weight_constant, double beta);

  /// Smallest C for which `values` satisfies the bound with the given beta.
  static SingularRHS fit(GridFunction values, double beta = 0.5);

  const GridFunction& values() const noexcept { return values_; }
  const MeshPtr& mesh_ptr() const noexcept { return values_.mesh_ptr(); }
  double weight_constant() const noexcept { return weight_constant_; }
  double beta() const noexcept { return beta_; }

 private:
  GridFunction values_;
  double weight_constant_;
  double beta_;
};

enum class InitialGuess {
  Zero,           ///< u = 0
  ScaledPoisson,  ///< alpha * S_2(g), alpha minimizing the energy along that ray
  FluxIntegral,   ///< accumulate the edge fluxes from the conservation law and integrate
};

struct SolveOptions {
  /// Weak residual target; 0 selects the default (1e-10 for p = 2, 1e-8 otherwise).
  double tol_residual = 0.0;
  /// The target is also capped at rel_target * max_i |g_i w_i| so small data are resolved.
  double rel_target = 1e-6;
  std::size_t max_newton = 100;
  double armijo = 1e-4;
  double backtrack = 0.5;
  std::size_t max_backtracks = 40;
  /// Preconditioned gradient steps tried when Newton stalls.
  std::size_t picard_steps = 200;
  /// Positivity floor used by callers that evaluate singular terms of the iterate.
  double u_floor = 1e-12;
  InitialGuess initial = InitialGuess::FluxIntegral;
  /// Optional full-node starting vector; overrides `initial` when non-empty.
  std::vector<double> start;

  double tolerance_for(PValue p) const noexcept;
};

struct SolveStats {
  std::size_t newton_iterations = 0;
  std::size_t fallback_steps = 0;
  /// Newton was restarted from the flux-integral guess after stalling.
  bool restarted = false;
  double residual = 0.0;
  /// Residual target actually enforced (scaled down for tiny right-hand sides).
  double target = 0.0;
};

/// Smallest residual worth asking for: flux evaluation from node differences loses
/// about eps_machine * N * sum |b| to rounding. `total_source` is sum_i |g_i w_i|.
double residual_floor(const Mesh& mesh, PValue p, double total_source);

/// The solution operator S: the unique Dirichlet u with -Delta_p u = g.
///
/// Damped Newton on the convex energy with Armijo backtracking. If Newton stalls it is
/// restarted once from the flux-integral guess, then Laplacian-preconditioned gradient
/// steps take over. Throws SolverFailure with the last residual when nothing reaches
/// the target. The target is min(tolerance, rel_target * max_i |g_i w_i|), raised to
/// residual_floor when rounding makes it unreachable.
GridFunction solve_S(const SingularRHS& g, PValue p, const SolveOptions& opts = {}, SolveStats* stats = nullptr);

/// Right-hand side g on {d > eps} and g_tilde on {d <= eps}.
GridFunction cutoff_rhs(const GridFunction& g, const GridFunction& g_tilde, double eps);

/// Solves -Delta_p u_eps = g chi_{d > eps} + g_tilde chi_{d <= eps}.
GridFunction solve_cutoff(const SingularRHS& g, const GridFunction& g_tilde, double eps, PValue p,
                          const SolveOptions& opts = {});

/// Largest eps on the dyadic grid {2^-k} (starting at the largest power of two not
/// above max d) such that u_eps' >= u / 2 at every node for every grid eps' <= eps,
/// where u = S(g). Requires g >= 0 and g not identically zero.
double find_eps0(const SingularRHS& g, const GridFunction& g_tilde, PValue p, const SolveOptions& opts = {});

}  // namespace singlap
