#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "singlap/dirichlet.hpp"
#include "singlap/grid.hpp"
#include "singlap/plap.hpp"

namespace singlap {

/// Seeded generator with a platform-independent uniform draw.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on [lo, hi) from the top 53 bits of the engine output.
  double uniform(double lo, double hi);
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

struct SimonSweep {
  double min_ratio = 0.0;  ///< smallest lhs / rhs seen (pairs with rhs = 0 skipped)
  std::size_t violations = 0;
  std::size_t samples = 0;
  double constant = 0.0;
};

/// Draws `count` pairs uniformly from [-10, 10]^dim and compares the monotonicity gap of
/// t -> |t|^{p-2} t against constant * rhs (rhs picked by p >= 2 or p < 2) with 1e-12
/// relative slack.
SimonSweep simon_sweep(PValue p, std::uint64_t seed, std::size_t count, double constant, std::size_t dim = 2);

/// Best constant in sum |u/d| w <= C (sum |Du|^p w_e)^{1/p} on this mesh. The extremal u
/// solves -Delta_p v = 1/d, and C = (sum v/d w)^{(p-1)/p}.
double hardy_sharp_constant(PValue p, const MeshPtr& mesh);

/// Dirichlet function with random shape: smooth modes, rough nodal noise or a boundary power.
GridFunction random_dirichlet(const MeshPtr& mesh, SampleRng& rng);

struct HardySweep {
  double max_ratio = 0.0;
  std::size_t violations = 0;
  std::size_t samples = 0;
  double constant = 0.0;
};

HardySweep hardy_sweep(PValue p, const MeshPtr& mesh, std::uint64_t seed, std::size_t count, double constant);

struct ComparisonSweep {
  double max_violation = 0.0;  ///< max over pairs and nodes of S(g1) - S(g2)
  std::size_t violations = 0;
  std::size_t samples = 0;
};

/// Random g1 <= g2 with |g| <= d^{-1/2}-type growth; checks S(g1) <= S(g2) + tol nodewise.
ComparisonSweep comparison_sweep(PValue p, const MeshPtr& mesh, std::uint64_t seed, std::size_t count,
                                 double tol = 1e-10);

/// Random right-hand side with |g| <= C d^{-beta}.
SingularRHS random_singular_rhs(double C, double beta, const MeshPtr& mesh, SampleRng& rng);

/// A priori bounds for S(g) over all |g| <= C d^{-beta} on an interval mesh.
struct UniformBound {
  double sup_bound = 0.0;   ///< sup |S(C d^{-beta})|, the comparison envelope
  double grad_bound = 0.0;  ///< (sum C d^{-beta} w)^{1/(p-1)}: no face flux exceeds the total source
  double c_prime = 0.0;     ///< max S(C d^{-beta}) / d over free nodes
  double bound() const noexcept { return sup_bound > grad_bound ? sup_bound : grad_bound; }
};

UniformBound uniform_bound(double C, double beta, PValue p, const MeshPtr& mesh);

struct BoundSweep {
  double max_sup = 0.0;
  double max_grad = 0.0;
  double max_over_d = 0.0;  ///< max |S(g)| / d
  std::size_t samples = 0;
};

BoundSweep singular_rhs_sweep(double C, double beta, PValue p, const MeshPtr& mesh, std::uint64_t seed,
                              std::size_t count);

/// Max over edges of |Du|.
double gradient_sup(const GridFunction& u);

}  // namespace singlap
