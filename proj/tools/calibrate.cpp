// Regenerates include/singlap/calibrated.hpp: ./singlap_calibrate > include/singlap/calibrated.hpp
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "singlap/continuum.hpp"
#include "singlap/dirichlet.hpp"
#include "singlap/properties.hpp"

using namespace singlap;

namespace {

constexpr std::uint64_t kSeed = 20240917;
constexpr double kExponents[4] = {1.5, 2.0, 3.0, 4.0};

void emit_array(const char* name, const double (&v)[4]) {
  std::printf("inline constexpr double %s[4] = {%.17g, %.17g, %.17g, %.17g};\n", name, v[0], v[1], v[2], v[3]);
}

void emit(const char* name, double v) { std::printf("inline constexpr double %s = %.17g;\n", name, v); }

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) g[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1));
  return g;
}

}  // namespace

int main() {
  double simon[4];
  double hardy[4];
  double m_disc[4];
  double c_prime[4];
  const MeshPtr fine = build_interval_mesh(1023);
  for (int k = 0; k < 4; ++k) {
    const PValue p(kExponents[k]);
    simon[k] = simon_sweep(p, kSeed, 100000, 0.0).min_ratio;
    hardy[k] = hardy_sharp_constant(p, fine);
    const UniformBound ub = uniform_bound(1.0, 0.5, p, fine);
    m_disc[k] = ub.bound();
    c_prime[k] = ub.c_prime;
  }

  const GridFunction one = GridFunction::constant(fine, 1.0);
  const GridFunction minus_one = GridFunction::constant(fine, -1.0);
  const double eps0 = find_eps0(SingularRHS::fit(one, 0.5), minus_one, PValue(2.0));

  const MeshPtr mesh = build_interval_mesh(511);
  const GridFunction zero = GridFunction::zeros(mesh, false);
  const PreparedProblem fam_d = prepare(ProblemSpec{PValue(2.0), mesh, Nonlinearity::family_d(0.5, 0.5), zero});
  const double lstar = fam_d.pack.lambda_star;
  const Branch anchor = trace_branch(fam_d, {2.0 * lstar}, true);
  const double anchor_mid = anchor.points.front().u[256];

  const Branch sweep = trace_branch(fam_d, log_grid(lstar, 10.0 * lstar, 50), true);
  const double ref_gap = check_connectedness(sweep, INFINITY).largest_gap;

  // Lipschitz proxy of the truncated map at the fixed point for 2 lambda_star.
  const UpperPack up = fam_d.upper(2.0 * lstar);
  const TruncationContext ctx = fam_d.truncation(2.0 * lstar, up);
  const GridFunction& ustar = anchor.points.front().u;
  SolveOptions tight;
  tight.rel_target = 1e-12;
  const GridFunction t0 = T_map(2.0 * lstar, ustar, ctx, zero, PValue(2.0), tight);
  SampleRng rng(kSeed);
  double k_obs = 0.0;
  for (int trial = 0; trial < 16; ++trial) {
    std::vector<double> v(ustar.values().begin(), ustar.values().end());
    for (double& x : v) x += 1e-6 * rng.uniform(-1.0, 1.0);
    const GridFunction moved = ustar.with_values(std::move(v));
    const double dist = sup_distance(moved, ustar);
    k_obs = std::max(k_obs, sup_distance(T_map(2.0 * lstar, moved, ctx, zero, PValue(2.0), tight), t0) / dist);
  }

  const PreparedProblem fam_c = prepare(ProblemSpec{PValue(2.0), mesh, Nonlinearity::family_c(1.0, 0.5), zero});
  const ThresholdEstimate est = find_threshold(fam_c, 0.01, 100.0, ThresholdOptions{});

  std::printf("#pragma once\n\n");
  std::printf("// Frozen calibration constants, generated by tools/calibrate.cpp.\n\n");
  std::printf("namespace singlap::calibrated {\n\n");
  std::printf("inline constexpr unsigned long long seed = %lluULL;\n", static_cast<unsigned long long>(kSeed));
  emit_array("exponents", kExponents);
  std::printf("\n// Smallest monotonicity-gap ratio over 1e5 seeded pairs in [-10,10]^2.\n");
  emit_array("simon_cp", simon);
  std::printf("\n// Best discrete Hardy constant on the 1023-node interval.\n");
  emit_array("hardy_ch", hardy);
  std::printf("\n// Bounds for S(g) over |g| <= d^{-1/2} on the 1023-node interval.\n");
  emit_array("m_disc", m_disc);
  emit_array("c_prime", c_prime);
  std::printf("\n// Dyadic cutoff threshold for g = 1, g_tilde = -1, p = 2, 1023 nodes.\n");
  emit("eps0_unit_rhs", eps0);
  std::printf("\n// Family d (alpha = q = 1/2), p = 2, h = 0, 511 nodes.\n");
  emit("family_d_lambda_star", lstar);
  emit("family_d_mid_value", anchor_mid);
  emit("family_d_reference_gap", ref_gap);
  emit("gap_tol", 1.5 * ref_gap);
  emit("continuity_observed", k_obs);
  emit("continuity_k", 1.5 * k_obs);
  std::printf("\n// Family c (a = 1, alpha = 1/2), p = 2, h = 0, 511 nodes, bracket [0.01, 100].\n");
  emit("family_c_lambda0_lo", est.lambda0_lo);
  emit("family_c_lambda0_hi", est.lambda0_hi);
  std::printf("\n}  // namespace singlap::calibrated\n");
  return 0;
}
