#include <cmath>
#include <vector>

#include "doctest.h"
#include "singlap/barriers.hpp"
#include "singlap/calibrated.hpp"
#include "singlap/continuum.hpp"
#include "singlap/errors.hpp"

using namespace singlap;

namespace {

const PreparedProblem& family_d() {
  static const PreparedProblem prob = [] {
    const MeshPtr m = build_interval_mesh(511);
    return prepare(ProblemSpec{PValue(2.0), m, Nonlinearity::family_d(0.5, 0.5), GridFunction::zeros(m, false)});
  }();
  return prob;
}

GridFunction free_constant(const MeshPtr& m, double c) {
  return GridFunction(m, std::vector<double>(m->node_count(), c), false);
}

AssumptionReport manual_report(double beta, double a, double A, double b) {
  AssumptionReport r;
  r.beta = beta;
  r.a_const = a;
  r.A = A;
  r.b_const = b;
  r.C_small = 1.0;
  r.checks.push_back({"manual", true, 0.0, ""});
  return r;
}

}  // namespace

TEST_CASE("singular phi obeys the scaling identity") {
  const MeshPtr m = build_interval_mesh(255);
  for (double p : {2.0, 3.0}) {
    const GridFunction base = solve_singular_phi(1.0, 0.5, PValue(p), m);
    for (double mult : {0.1, 10.0}) {
      const GridFunction u = solve_singular_phi(mult, 0.5, PValue(p), m);
      const double c = std::pow(mult, 1.0 / (p - 1.0 + 0.5));
      double err = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(u[i] - c * base[i]));
      CHECK(err <= 1e-6 * u.sup_norm());
    }
  }
}

TEST_CASE("singular phi converges under refinement and dominates a multiple of phi1") {
  std::vector<GridFunction> sols;
  for (std::size_t n : {255u, 511u, 1023u}) {
    const MeshPtr m = build_interval_mesh(n);
    sols.push_back(solve_singular_phi(1.0, 0.5, PValue(2.0), m));
    const EigenPair e = first_eigenpair(PValue(2.0), m);
    double eps_m = INFINITY;
    for (std::size_t i = 1; i <= n; ++i) eps_m = std::min(eps_m, sols.back()[i] / e.phi1[i]);
    CHECK(eps_m > 0.0);
  }
  auto diff = [](const GridFunction& c, const GridFunction& f) {
    double e = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) e = std::max(e, std::abs(c[i] - f[2 * i]));
    return e;
  };
  CHECK(diff(sols[1], sols[2]) < diff(sols[0], sols[1]));
}

TEST_CASE("singular phi shrinks with its coefficient") {
  const MeshPtr m = build_interval_mesh(255);
  double prev = INFINITY;
  for (double mult : {1.0, 0.1, 0.01}) {
    const double s = solve_singular_phi(mult, 0.5, PValue(2.0), m).sup_norm();
    CHECK(s < prev);
    prev = s;
  }
}

TEST_CASE("lower constants") {
  const LowerConstants k = lower_constants(manual_report(0.5, 1.0, 2.0, 1.0), PValue(2.0), 1.5, 0.1);
  CHECK(k.r == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(k.delta == 1.0);
  CHECK(k.gamma == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(k.lambda_star == doctest::Approx(std::pow(2.0 * 2.0 / (1.5 * 0.1), 1.5)).epsilon(1e-14));
  for (double p : {1.5, 3.0}) {
    for (double beta : {0.2, 0.7}) {
      CHECK(lower_constants(manual_report(beta, 1.0, 1.0, 1.0), PValue(p), 1.0, 0.1).delta == 1.0);
    }
  }
  CHECK_THROWS_AS(lower_constants(manual_report(0.5, 1.0, 2.0, 1.0), PValue(2.0), 0.0, 0.1), InvalidArgument);
}

TEST_CASE("psi with no negative part stays below phi") {
  const MeshPtr m = build_interval_mesh(511);
  const GridFunction phi = solve_singular_phi(1.0, 0.5, PValue(2.0), m);
  PsiMargins margins;
  build_psi(1.0, 0.0, 0.5, 0.05, phi, PValue(2.0), &margins);
  CHECK(margins.upper >= 0.0);
}

TEST_CASE("barrier pack satisfies the psi sandwich at two resolutions") {
  for (std::size_t n : {255u, 511u}) {
    const MeshPtr m = build_interval_mesh(n);
    const PreparedProblem prob =
        prepare(ProblemSpec{PValue(2.0), m, Nonlinearity::family_d(0.5, 0.5), GridFunction::zeros(m, false)});
    const BarrierPack& b = prob.pack;
    CHECK(b.margins.lower > 0.0);
    CHECK(b.margins.upper > 0.0);
    CHECK(b.eps_cut <= 0.5 * b.eps0);
    const double s = b.delta;  // delta^{1/(p-1)} with p = 2
    for (std::size_t i = 1; i <= n; ++i) {
      CHECK(b.psi[i] >= 0.5 * s * b.phi[i]);
      CHECK(b.psi[i] <= s * b.phi[i]);
      CHECK(b.phi[i] > 0.0);
      CHECK(b.psi[i] > 0.0);
    }
    CHECK(b.c1 > 0.0);
    CHECK(b.eps_m > 0.0);
  }
}

TEST_CASE("an oversized cutoff breaks the psi bounds") {
  const BarrierPack& b = family_d().pack;
  try {
    build_psi(b.delta, b.gamma, b.beta, 0.4, b.phi, PValue(2.0));
    FAIL("expected BarrierConstructionError");
  } catch (const BarrierConstructionError& e) {
    CHECK(e.node() >= 1);
    CHECK(e.node() <= 511);
    CHECK(e.violation() < 0.0);
  }
}

TEST_CASE("lower solution scaling and domain") {
  const BarrierPack& b = family_d().pack;
  CHECK(b.lambda_star == doctest::Approx(calibrated::family_d_lambda_star).epsilon(1e-9));
  const GridFunction l1 = lower_solution(b.lambda_star, b);
  const GridFunction l2 = lower_solution(2.0 * b.lambda_star, b);
  const double f = std::pow(2.0, b.r);
  for (std::size_t i = 0; i < l1.size(); ++i) {
    CHECK(l1[i] == doctest::Approx(std::pow(b.lambda_star, b.r) * b.psi[i]).epsilon(1e-14));
    CHECK(l2[i] == doctest::Approx(f * l1[i]).epsilon(1e-14));
    CHECK(l2[i] >= l1[i]);
  }
  CHECK_THROWS_AS(lower_solution(0.5 * b.lambda_star, b), DomainError);
}

TEST_CASE("lower solution exceeds the onset away from the boundary") {
  const PreparedProblem& prob = family_d();
  for (double mult : {1.0, 2.0, 10.0}) CHECK(interior_excess(prob.pack, mult * prob.pack.lambda_star, prob.report.A) > 0.0);
}

TEST_CASE("lower solution is a subsolution for family d") {
  const PreparedProblem& prob = family_d();
  for (double mult : {1.0, 2.0, 10.0}) {
    const double lambda = mult * prob.pack.lambda_star;
    const MarginReport r = verify_subsolution(lower_solution(lambda, prob.pack), lambda, prob.spec.f, prob.spec.h, prob.spec.p);
    CHECK_MESSAGE(r.passed, "lambda = " << mult << " lambda_star");
  }
}

TEST_CASE("upper constants") {
  const PreparedProblem& prob = family_d();
  const double ls = prob.pack.lambda_star;
  const UpperPack up = prob.upper(2.0 * ls);
  const double pm1 = 1.0;
  const double phi_sup = prob.pack.phi.sup_norm();
  CHECK(up.M_terms[2] == 0.0);
  CHECK(up.M_const == std::max(up.M_terms[0], up.M_terms[1]));
  CHECK(up.M_const >= std::pow(2.0 * ls, prob.pack.r) * std::pow(prob.pack.delta, 1.0 / pm1));
  CHECK(up.Lambda * up.eps_bar * std::pow(phi_sup, pm1 + prob.report.beta) < 0.25);
  for (std::size_t i = 0; i < up.u_upper.size(); ++i) CHECK(up.u_upper[i] == doctest::Approx(up.M_const * prob.pack.phi[i]));
  CHECK_THROWS_AS(prob.upper(0.5 * ls), DomainError);
}

TEST_CASE("upper barrier is a supersolution and dominates the lower one") {
  const PreparedProblem& prob = family_d();
  const double ls = prob.pack.lambda_star;
  for (double Lmult : {1.0, 2.0, 10.0}) {
    const UpperPack up = prob.upper(Lmult * ls);
    for (double mult : {1.0, Lmult}) {
      const double lambda = mult * ls;
      CHECK(verify_supersolution(up.u_upper, lambda, prob.spec.f, prob.spec.h, prob.spec.p).passed);
      const GridFunction low = lower_solution(lambda, prob.pack);
      for (std::size_t i = 0; i < low.size(); ++i) CHECK(low[i] <= up.u_upper[i]);
    }
  }
}

TEST_CASE("swapping the barriers fails the inequalities") {
  const PreparedProblem& prob = family_d();
  const double lambda = 10.0 * prob.pack.lambda_star;
  const UpperPack up = prob.upper(lambda);
  const MarginReport sub = verify_subsolution(up.u_upper, lambda, prob.spec.f, prob.spec.h, prob.spec.p);
  CHECK_FALSE(sub.passed);
  CHECK(sub.worst_margin < 0.0);
  const MarginReport sup =
      verify_supersolution(lower_solution(lambda, prob.pack), lambda, prob.spec.f, prob.spec.h, prob.spec.p);
  CHECK_FALSE(sup.passed);
}

TEST_CASE("a tiny multiple of phi1 is a subsolution exactly when the source dominates") {
  const PreparedProblem& prob = family_d();
  const GridFunction& phi1 = prob.eigen.phi1;
  std::vector<double> v(phi1.values().begin(), phi1.values().end());
  for (double& x : v) x *= 1e-6;
  const GridFunction tiny = phi1.with_values(v);
  const GridFunction lap = apply_p_laplacian(tiny, prob.spec.p);
  for (double lambda : {1e-12, 1e-3}) {
    bool dominates = true;
    for (std::size_t i = 1; i <= 511; ++i) dominates = dominates && lap[i] <= lambda * prob.spec.f(tiny[i]);
    CHECK(verify_subsolution(tiny, lambda, prob.spec.f, prob.spec.h, prob.spec.p).passed == dominates);
  }
}

TEST_CASE("a large source needs a refreshed upper barrier") {
  const PreparedProblem& prob = family_d();
  const double Lambda = 2.0 * prob.pack.lambda_star;
  const UpperPack stale = prob.upper(Lambda);
  const GridFunction h = free_constant(prob.spec.mesh, 50.0);
  CHECK_FALSE(verify_supersolution(stale.u_upper, Lambda, prob.spec.f, h, prob.spec.p).passed);
  const UpperPack fresh = upper_constants(Lambda, prob.report, prob.spec.f, h.sup_norm(), prob.pack, prob.spec.p);
  CHECK(fresh.M_terms[2] > 0.0);
  CHECK(fresh.M_const >= fresh.M_terms[2]);
  CHECK(verify_supersolution(fresh.u_upper, Lambda, prob.spec.f, h, prob.spec.p).passed);
  CHECK(verify_supersolution(fresh.u_upper, prob.pack.lambda_star, prob.spec.f, h, prob.spec.p).passed);
}

TEST_CASE("failing reports are rejected") {
  const MeshPtr m = build_interval_mesh(63);
  const Nonlinearity f = Nonlinearity::custom({{1.0, -1.2}});
  const AssumptionReport r = validate_assumptions(f, PValue(2.0));
  CHECK_THROWS_AS(build_barriers(r, PValue(2.0), m, first_eigenpair(PValue(2.0), m)), InvalidArgument);
}
