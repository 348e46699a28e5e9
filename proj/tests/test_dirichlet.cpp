#include <cmath>
#include <vector>

#include "doctest.h"
#include "singlap/calibrated.hpp"
#include "singlap/dirichlet.hpp"
#include "singlap/errors.hpp"
#include "singlap/properties.hpp"

using namespace singlap;

namespace {

GridFunction free_function(const MeshPtr& m, double (*fn)(double)) {
  std::vector<double> v(m->node_count(), 0.0);
  for (std::size_t i = m->free_begin(); i < m->free_end(); ++i) v[i] = fn(m->coords[i]);
  return GridFunction(m, std::move(v), false);
}

GridFunction free_constant(const MeshPtr& m, double c) {
  return GridFunction(m, std::vector<double>(m->node_count(), c), false);
}

// Closed-form solution of -(|u'|^{p-2}u')' = 1 on (0,1) with zero boundary values.
double closed_form(double x, double p) {
  const double e = p / (p - 1.0);
  return (std::pow(0.5, e) - std::pow(std::abs(x - 0.5), e)) / e;
}

}  // namespace

TEST_CASE("zero source gives the zero solution") {
  const MeshPtr m = build_interval_mesh(63);
  for (double p : {1.5, 2.0, 3.0}) {
    const GridFunction u = solve_S(SingularRHS::fit(free_constant(m, 0.0), 0.5), PValue(p));
    CHECK(u.sup_norm() == 0.0);
  }
}

TEST_CASE("unit source matches the closed form") {
  const MeshPtr m = build_interval_mesh(1023);
  const SingularRHS g = SingularRHS::fit(free_constant(m, 1.0), 0.5);
  const GridFunction u2 = solve_S(g, PValue(2.0));
  CHECK(std::abs(u2.sup_norm() - 0.125) <= 1e-6);
  const GridFunction u3 = solve_S(g, PValue(3.0));
  CHECK(std::abs(u3.sup_norm() - 0.2357022603955158) <= 1e-4);
  for (double p : {1.5, 2.0, 2.5, 3.0, 4.0, 6.0}) {
    const GridFunction u = solve_S(g, PValue(p));
    double err = 0.0;
    for (std::size_t i = 0; i < m->node_count(); ++i) err = std::max(err, std::abs(u[i] - closed_form(m->coords[i], p)));
    CHECK_MESSAGE(err <= 1e-4, "p = " << p);
  }
}

TEST_CASE("singular source converges under refinement") {
  // g = 0.5 d^{-0.4}; compare on the nodes shared by consecutive grids.
  std::vector<GridFunction> sols;
  for (std::size_t n : {255u, 511u, 1023u}) {
    const MeshPtr m = build_interval_mesh(n);
    const GridFunction g = free_function(m, [](double x) { return 0.5 / std::pow(std::min(x, 1.0 - x), 0.4); });
    SolveOptions opts;
    opts.rel_target = 1e-10;
    sols.push_back(solve_S(SingularRHS::fit(g, 0.4), PValue(2.0), opts));
  }
  auto coarse_diff = [](const GridFunction& c, const GridFunction& f) {
    double e = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) e = std::max(e, std::abs(c[i] - f[2 * i]));
    return e;
  };
  const double e1 = coarse_diff(sols[0], sols[1]);
  const double e2 = coarse_diff(sols[1], sols[2]);
  CHECK(e1 > 0.0);
  CHECK(e1 / e2 >= 1.5);
}

TEST_CASE("weighted bound is enforced") {
  const MeshPtr m = build_interval_mesh(31);
  const GridFunction g = free_function(m, [](double x) { return 1.0 / std::min(x, 1.0 - x); });
  CHECK_THROWS_AS(SingularRHS(g, 1.0, 0.5), InvalidArgument);
  CHECK_NOTHROW(SingularRHS(g, 1.1, 0.99));
  CHECK_THROWS_AS(SingularRHS(g, 1.0, 1.0), InvalidArgument);
  const SingularRHS fit = SingularRHS::fit(g, 0.5);
  CHECK(fit.weight_constant() > 1.0);
}

TEST_CASE("solutions of nonnegative sources are nonnegative") {
  const MeshPtr m = build_interval_mesh(200);
  SampleRng rng(4);
  for (double p : {1.5, 2.0, 3.0}) {
    for (int k = 0; k < 10; ++k) {
      const SingularRHS signed_g = random_singular_rhs(1.0, 0.5, m, rng);
      std::vector<double> g(signed_g.values().values().begin(), signed_g.values().values().end());
      for (double& x : g) x = std::abs(x);
      const GridFunction u = solve_S(SingularRHS::fit(GridFunction(m, g, false), 0.5), PValue(p));
      for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] >= 0.0);
    }
  }
}

TEST_CASE("different starting guesses reach the same solution") {
  const MeshPtr m = build_interval_mesh(255);
  SampleRng rng(12);
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const SingularRHS g = random_singular_rhs(1.0, 0.5, m, rng);
    SolveOptions a;
    a.initial = InitialGuess::Zero;
    a.rel_target = 1e-10;
    SolveOptions b = a;
    b.initial = InitialGuess::ScaledPoisson;
    SolveOptions c = a;
    c.initial = InitialGuess::FluxIntegral;
    const GridFunction ua = solve_S(g, PValue(p), a);
    CHECK(sup_distance(ua, solve_S(g, PValue(p), b)) <= 1e-7);
    CHECK(sup_distance(ua, solve_S(g, PValue(p), c)) <= 1e-7);
  }
}

TEST_CASE("small exponents still converge") {
  const MeshPtr m = build_interval_mesh(255);
  const SingularRHS g = SingularRHS::fit(free_constant(m, 1.0), 0.5);
  SolveStats stats;
  const GridFunction u = solve_S(g, PValue(1.2), {}, &stats);
  double err = 0.0;
  for (std::size_t i = 0; i < m->node_count(); ++i) err = std::max(err, std::abs(u[i] - closed_form(m->coords[i], 1.2)));
  CHECK(err <= 1e-4);
  CHECK(stats.residual <= stats.target);
}

TEST_CASE("solutions stay inside the uniform bounds") {
  const MeshPtr m = build_interval_mesh(1023);
  for (int k = 0; k < 4; ++k) {
    const PValue p(calibrated::exponents[k]);
    const BoundSweep s = singular_rhs_sweep(1.0, 0.5, p, m, calibrated::seed + 3, 100);
    CHECK(s.samples == 100);
    CHECK(std::max(s.max_sup, s.max_grad) <= calibrated::m_disc[k]);
    CHECK(s.max_over_d <= calibrated::c_prime[k]);
  }
}

TEST_CASE("uniform bound recomputation matches the frozen values") {
  const MeshPtr m = build_interval_mesh(1023);
  for (int k = 0; k < 4; ++k) {
    const UniformBound b = uniform_bound(1.0, 0.5, PValue(calibrated::exponents[k]), m);
    CHECK(b.bound() == doctest::Approx(calibrated::m_disc[k]).epsilon(1e-8));
    CHECK(b.c_prime == doctest::Approx(calibrated::c_prime[k]).epsilon(1e-6));
  }
}

TEST_CASE("cutoff with identical data changes nothing") {
  const MeshPtr m = build_interval_mesh(127);
  const GridFunction gv = free_constant(m, 1.0);
  const SingularRHS g = SingularRHS::fit(gv, 0.5);
  const GridFunction u = solve_S(g, PValue(3.0));
  CHECK(sup_distance(solve_cutoff(g, gv, 0.3, PValue(3.0)), u) <= 1e-9);
  CHECK(sup_distance(solve_cutoff(g, free_constant(m, -5.0), 0.0, PValue(3.0)), u) <= 1e-9);
}

TEST_CASE("cutoff solution stays above half the full solution for small eps") {
  const MeshPtr m = build_interval_mesh(1023);
  const GridFunction gv = free_constant(m, 1.0);
  const SingularRHS g = SingularRHS::fit(gv, 0.5);
  const GridFunction u = solve_S(g, PValue(2.0));
  const GridFunction zero = free_constant(m, 0.0);
  double prev = 0.0;
  for (double eps : {0.05, 0.025, 0.0125}) {
    const GridFunction ue = solve_cutoff(g, zero, eps, PValue(2.0));
    double ratio = INFINITY;
    for (std::size_t i = 1; i <= 1023; ++i) ratio = std::min(ratio, ue[i] / u[i]);
    CHECK(ratio >= 0.5);
    CHECK(ratio >= prev);
    prev = ratio;
  }
}

TEST_CASE("cutoff right-hand side switches at eps") {
  const MeshPtr m = build_interval_mesh(7);
  const GridFunction r = cutoff_rhs(free_constant(m, 1.0), free_constant(m, -2.0), 0.25);
  CHECK(r[1] == -2.0);
  CHECK(r[2] == -2.0);
  CHECK(r[3] == 1.0);
  CHECK(r[4] == 1.0);
  CHECK(r[6] == -2.0);
}

TEST_CASE("dyadic cutoff threshold") {
  const MeshPtr m = build_interval_mesh(1023);
  const GridFunction one = free_constant(m, 1.0);
  const SingularRHS g = SingularRHS::fit(one, 0.5);
  CHECK(find_eps0(g, one, PValue(2.0)) == 0.5);
  CHECK(find_eps0(g, free_constant(m, -1.0), PValue(2.0)) == calibrated::eps0_unit_rhs);
  CHECK_THROWS_AS(find_eps0(SingularRHS::fit(free_constant(m, 0.0), 0.5), one, PValue(2.0)), InvalidArgument);
  CHECK_THROWS_AS(find_eps0(SingularRHS::fit(free_constant(m, -1.0), 0.5), one, PValue(2.0)), InvalidArgument);
}
