#pragma once

#include <array>
#include <cstddef>

#include "singlap/eigenpair.hpp"
#include "singlap/grid.hpp"
#include "singlap/nonlin.hpp"
#include "singlap/plap.hpp"

namespace singlap {

struct SingularPhiOptions {
  /// Stop when the sup-norm increment drops below tol * ||u||.
  double tol = 1e-11;
  std::size_t max_iter = 200;
  double u_floor = 1e-12;
  /// Relative residual target handed to the inner Dirichlet solves.
  double rel_target = 1e-9;
};

/// Positive solution of -Delta_p u = m / u^beta.
///
/// Iterates u <- S(m / max(u, floor)^beta) from S(m). The antitone map is damped
/// geometrically, u <- u^{1-t} T(u)^t with t = 1 / (1 + beta/(p-1)), which removes
/// the oscillation of the scaling mode. Throws SolverFailure on nonconvergence.
GridFunction solve_singular_phi(double m, double beta, PValue p, const MeshPtr& mesh,
                                const SingularPhiOptions& opts = {});

struct LowerConstants {
  double r = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double lambda_star = 0.0;
};

/// r = 1/(p+beta-1), delta = a^{(p-1)/(p-1+beta)}, gamma = 2^beta b delta^{-beta/(p-1)},
/// lambda_star = [2A / (c1 eps_cut delta^{1/(p-1)})]^{1/r}.
LowerConstants lower_constants(const AssumptionReport& report, PValue p, double c1, double eps_cut);

struct PsiMargins {
  /// min over free nodes of psi - delta^{1/(p-1)} phi / 2.
  double lower = 0.0;
  /// min over free nodes of delta^{1/(p-1)} phi - psi.
  double upper = 0.0;
};

/// Solves -Delta_p psi = delta phi^-beta on {d > eps_cut} and -gamma phi^-beta on
/// {d <= eps_cut}, then checks delta^{1/(p-1)} phi / 2 <= psi <= delta^{1/(p-1)} phi.
/// Throws BarrierConstructionError naming the first violating node.
GridFunction build_psi(double delta, double gamma, double beta, double eps_cut, const GridFunction& phi, PValue p,
                       PsiMargins* margins = nullptr);

struct BarrierPack {
  GridFunction phi;  ///< solution of -Delta_p phi = phi^-beta
  GridFunction psi;
  double beta = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double r = 0.0;
  double eps0 = 0.0;  ///< dyadic cutoff estimate
  double eps_cut = 0.0;
  double lambda_star = 0.0;
  double c1 = 0.0;     ///< min phi / d
  double eps_m = 0.0;  ///< min phi / phi1
  PsiMargins margins;
  /// Number of times eps_cut was halved before the psi bounds held.
  std::size_t shrinks = 0;
};

struct BarrierOptions {
  SingularPhiOptions phi;
  /// eps_cut starts at eps0 * cut_fraction.
  double cut_fraction = 0.5;
  std::size_t max_shrinks = 12;
};

/// Builds phi, the cutoff, psi and lambda_star for a nonlinearity whose report passed.
/// Throws InvalidArgument for a failing report.
BarrierPack build_barriers(const AssumptionReport& report, PValue p, const MeshPtr& mesh, const EigenPair& eigen,
                           const BarrierOptions& opts = {});

/// lambda^r psi; throws DomainError below lambda_star.
GridFunction lower_solution(double lambda, const BarrierPack& pack);

/// min over nodes with d > eps_cut of lower_solution(lambda) - A.
double interior_excess(const BarrierPack& pack, double lambda, double A);

struct UpperPack {
  double M_const = 0.0;
  /// The three lower bounds for M (growth, small-s bound, source term).
  std::array<double, 3> M_terms{};
  double eps_bar = 0.0;
  double A1 = 0.0;
  double C = 0.0;
  double Lambda = 0.0;
  GridFunction u_upper;
};

/// eps_bar = 1/(8 Lambda ||phi||^{p-1+beta}), A1 and C from the growth bounds of f,
/// M = max{Lambda^r delta^{1/(p-1)}, (4 Lambda C)^{1/(p+beta-1)}, (4 h_sup ||phi||^beta)^{1/(p-1)}}.
/// Throws DomainError when Lambda < lambda_star.
UpperPack upper_constants(double Lambda, const AssumptionReport& report, const Nonlinearity& f, double h_sup,
                          const BarrierPack& pack, PValue p);

struct MarginReport {
  bool passed = false;
  /// min over free nodes of the weighted margin (negative means violated).
  double worst_margin = 0.0;
  std::size_t worst_node = 0;
  /// Allowed rounding slack at the worst node.
  double slack = 0.0;
};

/// -Delta_p u <= lambda f(u) + h at every free node (weighted, with a 1e-7 relative slack).
/// Requires u > 0 at free nodes.
MarginReport verify_subsolution(const GridFunction& u_low, double lambda, const Nonlinearity& f,
                                const GridFunction& h, PValue p);

/// -Delta_p u >= lambda f(u) + h at every free node.
MarginReport verify_supersolution(const GridFunction& u_up, double lambda, const Nonlinearity& f,
                                  const GridFunction& h, PValue p);

}  // namespace singlap
