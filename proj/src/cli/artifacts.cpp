#include "singlap/cli/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "singlap/calibrated.hpp"
#include "singlap/errors.hpp"

namespace singlap::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  out.close();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

std::string solution_csv(const GridFunction& u, const GridFunction* lower, const GridFunction* upper) {
  const Mesh& mesh = u.mesh();
  const GridFunction d = distance_field(u.mesh_ptr());
  std::ostringstream out;
  out << "x,u,d,u_lower,u_upper\n";
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    out << format_double(mesh.coords[i]) << ',' << format_double(u[i]) << ',' << format_double(d[i]) << ','
        << (lower != nullptr ? format_double((*lower)[i]) : "") << ','
        << (upper != nullptr ? format_double((*upper)[i]) : "") << '\n';
  }
  return out.str();
}

std::string branch_csv(const Branch& branch) {
  std::ostringstream out;
  out << "lambda,sup_norm,min_u_over_d,iterations,residual,converged,in_sandwich\n";
  for (const BranchPoint& pt : branch.points) {
    out << format_double(pt.lambda) << ',' << format_double(pt.sup_norm) << ',' << format_double(pt.min_u_over_d)
        << ',' << pt.iterations << ',' << format_double(pt.residual) << ',' << (pt.converged ? "true" : "false")
        << ',' << (pt.in_sandwich ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string eigen_csv(const GridFunction& phi) {
  const Mesh& mesh = phi.mesh();
  const GridFunction d = distance_field(phi.mesh_ptr());
  std::ostringstream out;
  out << "x,phi1,d\n";
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    out << format_double(mesh.coords[i]) << ',' << format_double(phi[i]) << ',' << format_double(d[i]) << '\n';
  }
  return out.str();
}

Json mesh_json(const Mesh& mesh) {
  Json j;
  j["kind"] = mesh.kind == MeshKind::Interval ? "interval" : "radial";
  j["n_interior"] = mesh.n_interior;
  j["dim"] = mesh.dim;
  j["radius"] = mesh.radius;
  j["spacing"] = mesh.spacing;
  return j;
}

Json assumptions_json(const AssumptionReport& report) {
  Json j;
  j["beta"] = report.beta;
  j["a"] = report.a_const;
  j["big_a"] = report.A;
  j["b"] = report.b_const;
  j["c_small"] = report.C_small;
  j["passed"] = report.passed();
  Json checks = Json::array();
  for (const HypothesisCheck& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"witness", c.witness}, {"detail", c.detail}});
  }
  j["checks"] = std::move(checks);
  return j;
}

Json barrier_json(const BarrierPack& pack) {
  Json j;
  j["lambda_star"] = pack.lambda_star;
  j["eps0"] = pack.eps0;
  j["eps"] = pack.eps_cut;
  j["delta"] = pack.delta;
  j["gamma"] = pack.gamma;
  j["r"] = pack.r;
  j["beta"] = pack.beta;
  j["c1"] = pack.c1;
  j["eps_m"] = pack.eps_m;
  j["psi_margin_lower"] = pack.margins.lower;
  j["psi_margin_upper"] = pack.margins.upper;
  j["shrinks"] = pack.shrinks;
  return j;
}

Json upper_json(const UpperPack& upper) {
  Json j;
  j["big_lambda"] = upper.Lambda;
  j["m"] = upper.M_const;
  j["m_terms"] = {upper.M_terms[0], upper.M_terms[1], upper.M_terms[2]};
  j["eps_bar"] = upper.eps_bar;
  j["a1"] = upper.A1;
  j["c"] = upper.C;
  return j;
}

Json calibrated_json() {
  auto by_p = [](const double (&v)[4]) {
    Json j;
    for (int k = 0; k < 4; ++k) j[format_double(calibrated::exponents[k])] = v[k];
    return j;
  };
  Json j;
  j["seed"] = calibrated::seed;
  j["simon_cp"] = by_p(calibrated::simon_cp);
  j["hardy_ch"] = by_p(calibrated::hardy_ch);
  j["m_disc"] = by_p(calibrated::m_disc);
  j["c_prime"] = by_p(calibrated::c_prime);
  j["eps0_unit_rhs"] = calibrated::eps0_unit_rhs;
  j["gap_tol"] = calibrated::gap_tol;
  j["continuity_k"] = calibrated::continuity_k;
  j["family_d_lambda_star"] = calibrated::family_d_lambda_star;
  j["family_d_mid_value"] = calibrated::family_d_mid_value;
  j["family_c_lambda0_lo"] = calibrated::family_c_lambda0_lo;
  j["family_c_lambda0_hi"] = calibrated::family_c_lambda0_hi;
  return j;
}

}  // namespace singlap::cli
