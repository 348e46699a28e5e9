#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "singlap/calibrated.hpp"
#include "singlap/continuum.hpp"
#include "singlap/errors.hpp"

using namespace singlap;

namespace {

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) g[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1));
  return g;
}

ProblemSpec spec_for(Nonlinearity f) {
  const MeshPtr m = build_interval_mesh(511);
  return ProblemSpec{PValue(2.0), m, std::move(f), GridFunction::zeros(m, false)};
}

const PreparedProblem& family_d() {
  static const PreparedProblem prob = prepare(spec_for(Nonlinearity::family_d(0.5, 0.5)));
  return prob;
}

const PreparedProblem& family_c() {
  static const PreparedProblem prob = prepare(spec_for(Nonlinearity::family_c(1.0, 0.5)));
  return prob;
}

const std::vector<double>& sweep_grid() {
  static const std::vector<double> g = log_grid(calibrated::family_d_lambda_star, 10.0 * calibrated::family_d_lambda_star, 50);
  return g;
}

const Branch& warm_sweep() {
  static const Branch b = trace_branch(family_d(), sweep_grid(), true);
  return b;
}

}  // namespace

TEST_CASE("frozen lambda_star is reproduced") {
  CHECK(family_d().pack.lambda_star == doctest::Approx(calibrated::family_d_lambda_star).epsilon(1e-9));
}

TEST_CASE("singleton grid matches a direct fixed-point solve") {
  const PreparedProblem& prob = family_d();
  const double ls = prob.pack.lambda_star;
  const Branch b = trace_branch(prob, {ls}, true);
  REQUIRE(b.points.size() == 1);
  CHECK(b.complete());
  const FixedPointResult r =
      solve_fixed_point(ls, prob.truncation(ls, prob.upper(ls)), prob.spec.h, prob.spec.p, prob.spec.solver);
  REQUIRE(r.converged);
  CHECK(sup_distance(b.points[0].u, r.u_star) <= 100.0 * prob.spec.solver.tol);
}

TEST_CASE("family d sweep converges everywhere with a nondecreasing sup norm") {
  const Branch& b = warm_sweep();
  REQUIRE(b.points.size() == 50);
  CHECK(b.complete());
  const double tol = family_d().spec.solver.tol;
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    const BranchPoint& pt = b.points[i];
    CHECK(pt.converged);
    CHECK(pt.in_sandwich);
    CHECK(pt.plain_residual <= 10.0 * tol);
    CHECK(pt.min_u_over_d > 0.0);
    if (i > 0) CHECK(pt.sup_norm >= b.points[i - 1].sup_norm);
  }
}

TEST_CASE("branch points lie between the barriers built for the grid maximum") {
  const PreparedProblem& prob = family_d();
  const Branch& b = warm_sweep();
  const double slack = 100.0 * prob.spec.solver.tol;
  for (const BranchPoint& pt : b.points) {
    const GridFunction low = lower_solution(pt.lambda, prob.pack);
    for (std::size_t i = 0; i < low.size(); ++i) {
      CHECK(pt.u[i] >= low[i] - slack);
      CHECK(pt.u[i] <= b.upper.u_upper[i] + slack);
    }
  }
}

TEST_CASE("warm and cold starts agree") {
  const Branch& warm = warm_sweep();
  const Branch cold = trace_branch(family_d(), sweep_grid(), false, 4);
  REQUIRE(cold.complete());
  for (std::size_t i = 0; i < warm.points.size(); ++i) {
    CHECK(sup_distance(warm.points[i].u, cold.points[i].u) <= 100.0 * family_d().spec.solver.tol);
  }
  const std::vector<double> few(sweep_grid().begin(), sweep_grid().begin() + 6);
  const Branch one = trace_branch(family_d(), few, false, 1);
  const Branch four = trace_branch(family_d(), few, false, 4);
  for (std::size_t i = 0; i < few.size(); ++i) CHECK(sup_distance(one.points[i].u, four.points[i].u) == 0.0);
}

TEST_CASE("connectedness proxy") {
  const Branch& b = warm_sweep();
  const ConnectednessReport r = check_connectedness(b, calibrated::gap_tol);
  CHECK(r.passed);
  CHECK(r.largest_gap == doctest::Approx(calibrated::family_d_reference_gap).epsilon(1e-6));

  Branch single = b;
  single.points.resize(1);
  CHECK(check_connectedness(single, 0.0).passed);

  // Thinning the grid eventually opens a gap wider than the tolerance.
  bool failed = false;
  for (std::size_t stride = 2; stride <= 16 && !failed; stride *= 2) {
    Branch thin = b;
    thin.points.clear();
    for (std::size_t i = 0; i < b.points.size(); i += stride) thin.points.push_back(b.points[i]);
    failed = !check_connectedness(thin, calibrated::gap_tol).passed;
  }
  CHECK(failed);
}

TEST_CASE("extension to a larger lambda range keeps the earlier solutions") {
  const std::vector<double>& grid = sweep_grid();
  const std::vector<double> head(grid.begin(), grid.begin() + 25);
  const Branch small = trace_branch(family_d(), head, true);
  const Branch& large = warm_sweep();
  REQUIRE(small.complete());
  CHECK(small.Lambda_max < large.Lambda_max);
  for (std::size_t i = 0; i < head.size(); ++i) {
    CHECK(sup_distance(small.points[i].u, large.points[i].u) <= 100.0 * family_d().spec.solver.tol);
  }
}

TEST_CASE("branch grid validation") {
  const PreparedProblem& prob = family_d();
  const double ls = prob.pack.lambda_star;
  CHECK_THROWS_AS(trace_branch(prob, {}, true), InvalidArgument);
  CHECK_THROWS_AS(trace_branch(prob, {0.5 * ls, ls}, true), DomainError);
  CHECK_THROWS_AS(trace_branch(prob, {2.0 * ls, ls}, true), InvalidArgument);
}

TEST_CASE("family c threshold regression") {
  const ThresholdEstimate est = find_threshold(family_c(), 0.01, 100.0);
  CHECK(est.lambda0_lo < est.lambda0_hi);
  CHECK(est.width == est.lambda0_hi - est.lambda0_lo);
  CHECK(est.width <= 0.01 * est.lambda0_hi);
  CHECK(est.lambda0_lo == doctest::Approx(calibrated::family_c_lambda0_lo).epsilon(1e-9));
  CHECK(est.lambda0_hi == doctest::Approx(calibrated::family_c_lambda0_hi).epsilon(1e-9));
  // Barriers only exist far above the threshold for this family.
  CHECK(family_c().pack.lambda_star > est.lambda0_hi);

  std::vector<double> lambdas;
  for (const SolvabilityTrial& t : est.trials) lambdas.push_back(t.lambda);
  std::sort(lambdas.begin(), lambdas.end());
  const MonotonicityReport mono = solvability_monotonicity(family_c(), lambdas);
  CHECK(mono.passed);
  CHECK(mono.violations == 0);
}

TEST_CASE("positive nonlinearity has no dichotomy") {
  const PreparedProblem prob = prepare(spec_for(Nonlinearity::family_e(0.5)));
  CHECK_THROWS_AS(find_threshold(prob, 1e-3, 100.0), NoDichotomy);
  CHECK(probe_solvability(prob, 1e-3).solvable);
}

TEST_CASE("reversed bracket is rejected") {
  CHECK_THROWS_AS(find_threshold(family_c(), 100.0, 0.01), InvalidArgument);
}

TEST_CASE("both endpoints unsolvable is no dichotomy") {
  CHECK_THROWS_AS(find_threshold(family_c(), 0.01, 1.0), NoDichotomy);
}

TEST_CASE("solvability monotonicity") {
  const PreparedProblem& d = family_d();
  const double ls = d.pack.lambda_star;
  const MonotonicityReport inside = solvability_monotonicity(d, {ls, 2.0 * ls, 5.0 * ls});
  CHECK(inside.passed);
  for (bool s : inside.solvable) CHECK(s);

  const MonotonicityReport straddle = solvability_monotonicity(family_c(), {1.0, 10.0, 50.0, 78.0, 80.0, 100.0, 200.0});
  CHECK(straddle.passed);
  std::size_t transitions = 0;
  for (std::size_t i = 1; i < straddle.solvable.size(); ++i) transitions += straddle.solvable[i] != straddle.solvable[i - 1];
  CHECK(transitions == 1);
  CHECK_FALSE(straddle.solvable.front());
  CHECK(straddle.solvable.back());

  CHECK(solvability_monotonicity(d, {}).passed);
}

TEST_CASE("negative source is rejected") {
  ProblemSpec spec = spec_for(Nonlinearity::family_d(0.5, 0.5));
  spec.h = GridFunction(spec.mesh, std::vector<double>(spec.mesh->node_count(), -1.0), false);
  CHECK_THROWS_AS(prepare(spec), InvalidArgument);
}

TEST_CASE("failing assumptions are rejected before any solve") {
  CHECK_THROWS_AS(prepare(spec_for(Nonlinearity::custom({{1.0, -1.5}}))), InvalidArgument);
}
