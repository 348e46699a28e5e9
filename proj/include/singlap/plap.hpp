#pragma once

#include <span>
#include <vector>

#include "singlap/grid.hpp"
#include "singlap/tridiag.hpp"

namespace singlap {

/// Exponent p of the p-Laplacian, 1 < p < infinity.
class PValue {
 public:
  explicit PValue(double p);
  double value() const noexcept { return p_; }
  /// Gradient regularization used inside |Du|^{p-2}: 1e-10 for p < 2, none otherwise.
  double regularization() const noexcept { return p_ < 2.0 ? 1e-10 : 0.0; }

 private:
  double p_;
};

/// Discrete -Delta_p u at the free nodes (0 at Dirichlet nodes).
///
/// Finite-volume form: with edge fluxes F = |Du|^{p-2} Du and face areas A,
///   (-Delta_p u)_i = (A_{i-1/2} F_{i-1/2} - A_{i+1/2} F_{i+1/2}) / w_i.
GridFunction apply_p_laplacian(const GridFunction& u, PValue p);

/// J(u) = (1/p) sum_e |Du|^p w_e - sum_i g_i u_i w_i, the functional whose
/// minimizer solves -Delta_p u = g.
double energy(const GridFunction& u, const GridFunction& g, PValue p);

struct ResidualNorms {
  double max_norm = 0.0;  ///< max_i |(-Delta_p u - rhs)_i| w_i
  double l2 = 0.0;        ///< sqrt(sum_i w_i (-Delta_p u - rhs)_i^2)
};

ResidualNorms weak_residual_norms(const GridFunction& u, const GridFunction& rhs, PValue p);

/// max-norm figure of weak_residual_norms; this is what convergence tests compare against.
double weak_residual(const GridFunction& u, const GridFunction& rhs, PValue p);

struct SimonGap {
  double lhs = 0.0;         ///< (|x|^{p-2}x - |y|^{p-2}y) . (x - y)
  double rhs_p_ge_2 = 0.0;  ///< |x - y|^p
  double rhs_p_le_2 = 0.0;  ///< |x - y|^p / (1 + |x| + |y|)^{2-p}
};

SimonGap simon_gap(std::span<const double> x, std::span<const double> y, PValue p);

struct ComparisonReport {
  bool premise = false;      ///< -Delta_p u <= -Delta_p v at every free node (within tol)
  bool conclusion = false;   ///< u <= v at every node (within tol)
  bool holds = false;        ///< premise implies conclusion
  double margin = 0.0;       ///< min_i (v_i - u_i)
  double premise_gap = 0.0;  ///< min_i w_i ((-Delta_p v)_i - (-Delta_p u)_i)
};

ComparisonReport check_weak_comparison(const GridFunction& u, const GridFunction& v, PValue p, double tol = 1e-9);

/// sum_i |u_i / d_i| w_i over free nodes divided by (sum_e |Du|^p w_e)^{1/p}.
double hardy_ratio(const GridFunction& u, PValue p);

namespace detail {

/// Weighted operator at the free nodes: out[i] = w_i (-Delta_p u)_i, zero at Dirichlet
/// nodes. If `jac` is given it receives the tridiagonal Jacobian restricted to the
/// free nodes (row k <-> node free_begin + k). A positive `jac_shift_rel` adds
/// jac_shift_rel * max(dflux) to every edge derivative (1 if all vanish), which keeps
/// the Jacobian nonsingular where p > 2 and Du = 0.
void weighted_operator(const Mesh& mesh, std::span<const double> u, PValue p, std::span<double> out,
                       Tridiagonal* jac = nullptr, double jac_shift_rel = 0.0);

/// Regularized gradient energy (1/p) sum_e ((Du^2 + eps^2)^{p/2} - eps^p) w_e.
double gradient_energy(const Mesh& mesh, std::span<const double> u, PValue p);

}  // namespace detail

}  // namespace singlap
