#include "singlap/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "singlap/calibrated.hpp"
#include "singlap/errors.hpp"
#include "singlap/properties.hpp"
#include "singlap/simd/kernels.hpp"

namespace singlap::cli {

namespace fs = std::filesystem;

ExitCode exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return ExitCode::Config;
  if (dynamic_cast<const NoDichotomy*>(&e) != nullptr) return ExitCode::NoDichotomy;
  if (dynamic_cast<const SolverFailure*>(&e) != nullptr || dynamic_cast<const ThresholdNotFound*>(&e) != nullptr ||
      dynamic_cast<const BarrierConstructionError*>(&e) != nullptr) {
    return ExitCode::Failure;
  }
  if (dynamic_cast<const Error*>(&e) != nullptr) return ExitCode::Precondition;
  return ExitCode::Failure;
}

namespace {

MeshPtr mesh_from_config(const DomainConfig& d) {
  return d.kind == MeshKind::Interval ? build_interval_mesh(d.n) : build_radial_mesh(d.n, d.dim, d.radius);
}

Nonlinearity nonlinearity_from_config(const FamilyConfig& f) {
  if (f.family.empty()) throw ConfigError("this command needs 'f.family'", 0);
  auto param = [&](const char* name) {
    for (const auto& [key, value] : f.params) {
      if (key == name) return value;
    }
    throw ConfigError(std::string("missing parameter f.") + name, 0);
  };
  switch (f.family.front()) {
    case 'a': return Nonlinearity::family_a(param("q"), param("beta"));
    case 'b': return Nonlinearity::family_b(param("beta"), param("alpha"));
    case 'c': return Nonlinearity::family_c(param("a"), param("alpha"));
    case 'd': return Nonlinearity::family_d(param("alpha"), param("q"));
    case 'e': return Nonlinearity::family_e(param("alpha"));
    default: return Nonlinearity::family_f();
  }
}

GridFunction source_from_config(const SourceConfig& h, const MeshPtr& mesh) {
  const Mesh& m = *mesh;
  std::vector<double> v(m.node_count(), 0.0);
  if (h.kind == SourceConfig::Kind::Constant) {
    for (std::size_t i = m.free_begin(); i < m.free_end(); ++i) v[i] = h.value;
  } else if (h.kind == SourceConfig::Kind::File) {
    if (h.file_values.size() != m.node_count()) {
      throw ConfigError("h.file has " + std::to_string(h.file_values.size()) + " values, the mesh has " +
                            std::to_string(m.node_count()) + " nodes",
                        h.line);
    }
    for (std::size_t i = m.free_begin(); i < m.free_end(); ++i) v[i] = h.file_values[i];
  }
  return GridFunction(mesh, std::move(v), false);
}

Json family_json(const Nonlinearity& f) {
  Json j;
  j["family"] = f.tag();
  Json params = Json::object();
  for (const auto& [name, value] : f.parameters()) params[name] = value;
  j["params"] = std::move(params);
  return j;
}

Json margin_json(const MarginReport& r) {
  return {{"passed", r.passed}, {"worst_margin", r.worst_margin}, {"worst_node", r.worst_node}, {"slack", r.slack}};
}

/// State shared by the command bodies.
struct Run {
  const RunConfig& cfg;
  const CommandOptions& opts;
  fs::path out;
  Json& manifest;
  std::vector<std::string>& outputs;
  std::ostream& log;

  void write(const std::string& name, const std::string& text) {
    write_text(out / name, text);
    outputs.push_back(name);
  }
  double absolute(double value, double lambda_star) const {
    return cfg.lambda.relative ? value * lambda_star : value;
  }
};

PreparedProblem prepare_logged(Run& run) {
  const ProblemSpec spec = problem_from_config(run.cfg);
  Json problem;
  problem["p"] = spec.p.value();
  problem["mesh"] = mesh_json(*spec.mesh);
  problem["f"] = family_json(spec.f);
  problem["h"] = {{"kind", run.cfg.echo.count("h.kind") ? run.cfg.echo.at("h.kind") : "zero"},
                  {"sup_norm", spec.h.sup_norm()}};
  run.manifest["problem"] = std::move(problem);
  PreparedProblem prob = prepare(spec);
  run.manifest["assumptions"] = assumptions_json(prob.report);
  run.manifest["eigen"] = {{"lambda1", prob.eigen.lambda1},
                           {"iterations", prob.eigen.iterations},
                           {"residual", prob.eigen.residual}};
  run.manifest["barrier"] = barrier_json(prob.pack);
  run.log << "lambda_star = " << format_double(prob.pack.lambda_star) << "\n";
  return prob;
}

int cmd_solve(Run& run) {
  if (!run.cfg.lambda.scalar) throw ConfigError("solve needs a scalar 'lambda'", 0);
  const PreparedProblem prob = prepare_logged(run);
  const ProblemSpec& spec = prob.spec;
  const double lambda = run.absolute(*run.cfg.lambda.scalar, prob.pack.lambda_star);
  Json result;
  result["lambda"] = lambda;
  if (lambda < prob.pack.lambda_star) {
    if (!run.opts.exploratory) {
      throw DomainError("lambda below lambda_star (" + format_double(lambda) + " < " +
                        format_double(prob.pack.lambda_star) + ")");
    }
    const ExploratoryResult r = solve_exploratory(lambda, spec);
    result["mode"] = "exploratory";
    result["converged"] = r.converged;
    result["floor_active"] = r.floor_active;
    result["solvable"] = r.solvable();
    result["iterations"] = r.iterations;
    result["residual"] = r.residual;
    result["target"] = r.target;
    result["sup_norm"] = r.u.sup_norm();
    run.manifest["result"] = std::move(result);
    run.write("solution.csv", solution_csv(r.u, nullptr, nullptr));
    return static_cast<int>(r.solvable() ? ExitCode::Ok : ExitCode::Failure);
  }

  const UpperPack up = prob.upper(lambda);
  run.manifest["upper"] = upper_json(up);
  const TruncationContext ctx = prob.truncation(lambda, up);
  const FixedPointResult r = solve_fixed_point(lambda, ctx, spec.h, spec.p, spec.solver);
  result["mode"] = "barrier";
  result["converged"] = r.converged;
  result["method"] = r.method;
  result["iterations"] = r.iterations;
  result["residual"] = r.residual;
  result["target"] = r.target;
  result["plain_residual"] = plain_residual(spec, lambda, r.u_star);
  result["in_sandwich"] = r.in_sandwich;
  result["sup_norm"] = r.u_star.sup_norm();
  result["subsolution"] = margin_json(verify_subsolution(ctx.u_lower, lambda, spec.f, spec.h, spec.p));
  result["supersolution"] = margin_json(verify_supersolution(ctx.u_upper, lambda, spec.f, spec.h, spec.p));
  if (!r.failure.empty()) result["failure"] = r.failure;
  run.manifest["result"] = std::move(result);
  run.write("solution.csv", solution_csv(r.u_star, &ctx.u_lower, &ctx.u_upper));
  run.log << "solve: " << (r.converged ? "converged" : "not converged") << " residual "
          << format_double(r.residual) << "\n";
  return static_cast<int>(r.converged ? ExitCode::Ok : ExitCode::Failure);
}

Json point_json(const BranchPoint& pt) {
  Json j;
  j["lambda"] = pt.lambda;
  j["sup_norm"] = pt.sup_norm;
  j["min_u_over_d"] = pt.min_u_over_d;
  j["iterations"] = pt.iterations;
  j["residual"] = pt.residual;
  j["plain_residual"] = pt.plain_residual;
  j["target"] = pt.target;
  j["converged"] = pt.converged;
  j["in_sandwich"] = pt.in_sandwich;
  j["method"] = pt.method;
  if (!pt.failure.empty()) j["failure"] = pt.failure;
  return j;
}

int cmd_sweep(Run& run) {
  if (!run.cfg.lambda.has_grid) throw ConfigError("sweep needs lambda.min, lambda.max and lambda.count", 0);
  if (run.cfg.lambda.count == 0) throw InvalidArgument("empty lambda grid");
  const PreparedProblem prob = prepare_logged(run);
  const std::vector<double> grid = lambda_grid(run.cfg.lambda, prob.pack.lambda_star);
  const Branch branch = trace_branch(prob, grid, run.cfg.sweep.warm_start, run.opts.jobs);
  run.manifest["upper"] = upper_json(branch.upper);

  const double gap_tol = run.cfg.sweep.gap_tol.value_or(calibrated::gap_tol);
  const ConnectednessReport conn = check_connectedness(branch, gap_tol);
  bool nondecreasing = true;
  for (std::size_t k = 1; k < branch.points.size(); ++k) {
    nondecreasing = nondecreasing && branch.points[k].sup_norm >= branch.points[k - 1].sup_norm;
  }

  Json path = {{"compared", false}};
  bool agree = true;
  if (run.cfg.sweep.compare_cold) {
    const Branch other = trace_branch(prob, grid, !run.cfg.sweep.warm_start, run.opts.jobs);
    double diff = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (branch.points[k].converged && other.points[k].converged) {
        diff = std::max(diff, sup_distance(branch.points[k].u, other.points[k].u));
      } else {
        agree = false;
      }
    }
    const double tol = 100.0 * run.cfg.solver.tol;
    agree = agree && diff <= tol;
    path = {{"compared", true}, {"max_difference", diff}, {"tolerance", tol}, {"passed", agree}};
  }

  Json doc;
  doc["lambda_star"] = branch.lambda_star;
  doc["lambda_max"] = branch.Lambda_max;
  doc["warm_start"] = branch.warm_start;
  doc["complete"] = branch.complete();
  doc["constants"] = {{"lambda_star", prob.pack.lambda_star}, {"delta", prob.pack.delta},
                      {"gamma", prob.pack.gamma},             {"r", prob.pack.r},
                      {"m", branch.upper.M_const},            {"eps", prob.pack.eps_cut},
                      {"eps0", prob.pack.eps0}};
  doc["solver"] = {{"tol", run.cfg.solver.tol},
                   {"rel_target", run.cfg.solver.rel_target},
                   {"max_iter", run.cfg.solver.max_iter},
                   {"damping", run.cfg.solver.damping}};
  doc["connectedness"] = {{"passed", conn.passed},
                          {"largest_gap", conn.largest_gap},
                          {"gap_index", conn.gap_index},
                          {"gap_tol", gap_tol}};
  doc["sup_norm_nondecreasing"] = nondecreasing;
  doc["path_independence"] = std::move(path);
  Json points = Json::array();
  for (const BranchPoint& pt : branch.points) points.push_back(point_json(pt));
  doc["points"] = std::move(points);

  run.write("branch.csv", branch_csv(branch));
  run.write("branch.json", dump(doc));
  run.manifest["result"] = {{"complete", branch.complete()}, {"connected", conn.passed}, {"path_independent", agree}};
  run.log << "sweep: " << grid.size() << " points, complete " << branch.complete() << ", largest gap "
          << format_double(conn.largest_gap) << "\n";
  return static_cast<int>(branch.complete() && conn.passed && agree ? ExitCode::Ok : ExitCode::Failure);
}

int cmd_threshold(Run& run) {
  if (!run.cfg.threshold.lo || !run.cfg.threshold.hi) {
    throw ConfigError("threshold needs threshold.lo and threshold.hi", 0);
  }
  const PreparedProblem prob = prepare_logged(run);
  const double lo = run.absolute(*run.cfg.threshold.lo, prob.pack.lambda_star);
  const double hi = run.absolute(*run.cfg.threshold.hi, prob.pack.lambda_star);
  ThresholdOptions topts;
  topts.rel_width = run.cfg.threshold.rel_width;
  const ThresholdEstimate est = find_threshold(prob, lo, hi, topts);

  std::vector<SolvabilityTrial> sorted = est.trials;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  std::size_t flips = 0;
  for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
    if (sorted[k].solvable && !sorted[k + 1].solvable) ++flips;
  }
  Json trials = Json::array();
  for (const SolvabilityTrial& t : est.trials) {
    trials.push_back({{"lambda", t.lambda},
                      {"solvable", t.solvable},
                      {"mode", t.mode},
                      {"residual", t.residual},
                      {"attempts", t.attempts}});
  }
  Json doc;
  doc["lambda0_lo"] = est.lambda0_lo;
  doc["lambda0_hi"] = est.lambda0_hi;
  doc["width"] = est.width;
  doc["rel_width"] = topts.rel_width;
  doc["lambda_star"] = prob.pack.lambda_star;
  doc["monotone"] = {{"passed", flips == 0}, {"violations", flips}};
  doc["trials"] = std::move(trials);
  run.write("threshold.json", dump(doc));
  run.manifest["result"] = {{"lambda0_lo", est.lambda0_lo}, {"lambda0_hi", est.lambda0_hi}, {"monotone", flips == 0}};
  run.log << "threshold: [" << format_double(est.lambda0_lo) << ", " << format_double(est.lambda0_hi) << "]\n";
  return static_cast<int>(flips == 0 ? ExitCode::Ok : ExitCode::Failure);
}

int cmd_eigen(Run& run) {
  const MeshPtr mesh = mesh_from_config(run.cfg.domain);
  const PValue p(run.cfg.p);
  const EigenPair ep = first_eigenpair(p, mesh);
  const GridFunction d = distance_field(mesh);
  const Comparability comp = comparability_constants(ep.phi1, d);
  Json doc;
  doc["p"] = p.value();
  doc["mesh"] = mesh_json(*mesh);
  doc["lambda1"] = ep.lambda1;
  doc["rayleigh_quotient"] = rayleigh_quotient(ep.phi1, p);
  doc["iterations"] = ep.iterations;
  doc["residual"] = ep.residual;
  doc["c1"] = comp.c1;
  doc["c2"] = comp.c2;
  doc["boundary_slopes"] = ep.boundary_slopes;
  if (mesh->kind == MeshKind::Interval) {
    const double pv = p.value();
    const double pi_p = 2.0 * M_PI / (pv * std::sin(M_PI / pv));
    const double exact = (pv - 1.0) * std::pow(pi_p, pv);
    doc["continuum_lambda1"] = exact;
    doc["relative_error"] = std::abs(ep.lambda1 - exact) / exact;
  }
  run.manifest["eigen"] = {{"lambda1", ep.lambda1}, {"iterations", ep.iterations}, {"residual", ep.residual}};
  run.write("eigen.json", dump(doc));
  run.write("eigen.csv", eigen_csv(ep.phi1));
  run.log << "lambda1 = " << format_double(ep.lambda1) << "\n";
  return static_cast<int>(ExitCode::Ok);
}

int cmd_verify(Run& run) {
  const Json report = verify_report(run.cfg);
  for (const Json& suite : report["suites"]) {
    if (suite["name"] == "barriers") {
      run.manifest["barrier"] = suite["constants"];
      run.manifest["upper"] = suite["upper"];
    }
  }
  run.write("verify.json", dump(report));
  const bool passed = report["passed"].get<bool>();
  run.manifest["result"] = {{"passed", passed}};
  run.log << "verify: " << (passed ? "all suites passed" : "failures present") << "\n";
  return static_cast<int>(passed ? ExitCode::Ok : ExitCode::Failure);
}

Json error_json(const std::exception& e, ExitCode code) {
  Json err;
  const auto* lib = dynamic_cast<const Error*>(&e);
  err["kind"] = lib != nullptr ? lib->kind() : "internal";
  err["message"] = e.what();
  err["exit_code"] = static_cast<int>(code);
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) err["line"] = ce->line();
  return {{"error", std::move(err)}};
}

}  // namespace

ProblemSpec problem_from_config(const RunConfig& cfg) {
  const MeshPtr mesh = mesh_from_config(cfg.domain);
  ProblemSpec spec{PValue(cfg.p), mesh, nonlinearity_from_config(cfg.f), source_from_config(cfg.h, mesh)};
  spec.solver.tol = cfg.solver.tol;
  spec.solver.rel_target = cfg.solver.rel_target;
  spec.solver.max_iter = cfg.solver.max_iter;
  spec.solver.damping = cfg.solver.damping;
  return spec;
}

std::vector<double> lambda_grid(const LambdaConfig& cfg, double lambda_star) {
  std::vector<double> grid(cfg.count);
  const double scale = cfg.relative ? lambda_star : 1.0;
  for (std::size_t k = 0; k < cfg.count; ++k) {
    const double t = cfg.count > 1 ? static_cast<double>(k) / static_cast<double>(cfg.count - 1) : 0.0;
    const double v = cfg.log_spacing ? cfg.min * std::pow(cfg.max / cfg.min, t) : cfg.min + (cfg.max - cfg.min) * t;
    grid[k] = scale * v;
  }
  if (cfg.count > 1) grid.back() = scale * cfg.max;
  return grid;
}

Json verify_report(const RunConfig& cfg) {
  const MeshPtr mesh = build_interval_mesh(cfg.verify.n);
  const std::uint64_t seed = cfg.seed;
  const double slack = 1.0 + 1e-9;
  bool all = true;
  Json suites = Json::array();
  auto add = [&](Json suite, bool passed) {
    suite["passed"] = passed;
    all = all && passed;
    suites.push_back(std::move(suite));
  };

  {
    Json cases = Json::array();
    bool ok = true;
    for (int k = 0; k < 4; ++k) {
      const double c = cfg.verify.simon_cp.value_or(calibrated::simon_cp[k]);
      const SimonSweep s = simon_sweep(PValue(calibrated::exponents[k]), seed, cfg.verify.simon_samples, c);
      ok = ok && s.violations == 0;
      cases.push_back({{"p", calibrated::exponents[k]},
                       {"constant", c},
                       {"min_ratio", s.min_ratio},
                       {"samples", s.samples},
                       {"violations", s.violations}});
    }
    add({{"name", "simon"}, {"cases", std::move(cases)}}, ok);
  }
  {
    Json cases = Json::array();
    bool ok = true;
    for (int k = 0; k < 4; ++k) {
      const PValue p(calibrated::exponents[k]);
      const double sharp = hardy_sharp_constant(p, mesh);
      const HardySweep h = hardy_sweep(p, mesh, seed + 1, cfg.verify.hardy_samples, calibrated::hardy_ch[k]);
      const bool case_ok = h.violations == 0 && sharp <= calibrated::hardy_ch[k];
      ok = ok && case_ok;
      cases.push_back({{"p", p.value()},
                       {"constant", calibrated::hardy_ch[k]},
                       {"mesh_best_constant", sharp},
                       {"max_ratio", h.max_ratio},
                       {"samples", h.samples},
                       {"violations", h.violations}});
    }
    add({{"name", "hardy"}, {"cases", std::move(cases)}}, ok);
  }
  {
    Json cases = Json::array();
    bool ok = true;
    for (int k = 0; k < 4; ++k) {
      const PValue p(calibrated::exponents[k]);
      const ComparisonSweep c = comparison_sweep(p, mesh, seed + 2, cfg.verify.comparison_pairs);
      ok = ok && c.violations == 0;
      cases.push_back({{"p", p.value()},
                       {"max_violation", c.max_violation},
                       {"samples", c.samples},
                       {"violations", c.violations}});
    }
    add({{"name", "comparison"}, {"cases", std::move(cases)}}, ok);
  }
  {
    Json cases = Json::array();
    bool ok = true;
    for (int k = 0; k < 4; ++k) {
      const PValue p(calibrated::exponents[k]);
      const BoundSweep b = singular_rhs_sweep(1.0, 0.5, p, mesh, seed + 3, cfg.verify.bound_samples);
      const double m = calibrated::m_disc[k];
      const double cp = calibrated::c_prime[k];
      const bool case_ok = b.max_sup <= m * slack && b.max_grad <= m * slack && b.max_over_d <= cp * slack;
      ok = ok && case_ok;
      cases.push_back({{"p", p.value()},
                       {"m_disc", m},
                       {"c_prime", cp},
                       {"max_sup", b.max_sup},
                       {"max_grad", b.max_grad},
                       {"max_over_d", b.max_over_d},
                       {"samples", b.samples}});
    }
    add({{"name", "uniform_bound"}, {"cases", std::move(cases)}}, ok);
  }
  {
    const EigenPair ep = first_eigenpair(PValue(2.0), mesh);
    double sin_err = 0.0;
    for (std::size_t i = 0; i < mesh->node_count(); ++i) {
      sin_err = std::max(sin_err, std::abs(ep.phi1[i] - std::sin(M_PI * mesh->coords[i])));
    }
    const double rel = std::abs(ep.lambda1 - M_PI * M_PI) / (M_PI * M_PI);
    add({{"name", "eigen"},
         {"lambda1", ep.lambda1},
         {"relative_error", rel},
         {"sin_error", sin_err},
         {"residual", ep.residual}},
        rel <= 1e-3 && sin_err <= 1e-3 && ep.residual <= 1e-8);
  }
  {
    Json cases = Json::array();
    bool ok = true;
    for (double p : {2.0, 3.0}) {
      const GridFunction unit = solve_singular_phi(1.0, 0.5, PValue(p), mesh);
      for (double m : {0.1, 10.0}) {
        const GridFunction phi = solve_singular_phi(m, 0.5, PValue(p), mesh);
        const double factor = std::pow(m, 1.0 / (p - 1.0 + 0.5));
        double err = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) err = std::max(err, std::abs(phi[i] - factor * unit[i]));
        ok = ok && err <= 1e-6;
        cases.push_back({{"p", p}, {"m", m}, {"error", err}});
      }
    }
    add({{"name", "scaling"}, {"cases", std::move(cases)}}, ok);
  }
  {
    const GridFunction one = GridFunction::constant(mesh, 1.0);
    const GridFunction minus_one = GridFunction::constant(mesh, -1.0);
    const SingularRHS g = SingularRHS::fit(one, 0.5);
    const double eps0 = find_eps0(g, minus_one, PValue(2.0));
    const GridFunction u = solve_S(g, PValue(2.0));
    Json cases = Json::array();
    bool ok = true;
    for (double eps : {eps0, 0.5 * eps0}) {
      const GridFunction ue = solve_cutoff(g, minus_one, eps, PValue(2.0));
      double margin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < u.size(); ++i) margin = std::min(margin, ue[i] - 0.5 * u[i]);
      ok = ok && margin >= 0.0;
      cases.push_back({{"eps", eps}, {"margin", margin}});
    }
    add({{"name", "cutoff"}, {"eps0", eps0}, {"cases", std::move(cases)}}, ok);
  }
  {
    const GridFunction zero = GridFunction::zeros(mesh, false);
    const PreparedProblem prob = prepare(ProblemSpec{PValue(2.0), mesh, Nonlinearity::family_d(0.5, 0.5), zero});
    const double ls = prob.pack.lambda_star;
    const UpperPack up = prob.upper(2.0 * ls);
    Json cases = Json::array();
    bool ok = prob.pack.margins.lower > 0.0 && prob.pack.margins.upper > 0.0;
    for (double lambda : {ls, 2.0 * ls}) {
      const MarginReport sub = verify_subsolution(lower_solution(lambda, prob.pack), lambda, prob.spec.f, zero,
                                                  prob.spec.p);
      const MarginReport sup = verify_supersolution(up.u_upper, lambda, prob.spec.f, zero, prob.spec.p);
      ok = ok && sub.passed && sup.passed;
      cases.push_back({{"lambda", lambda}, {"subsolution", margin_json(sub)}, {"supersolution", margin_json(sup)}});
    }
    add({{"name", "barriers"},
         {"constants", barrier_json(prob.pack)},
         {"upper", upper_json(up)},
         {"cases", std::move(cases)}},
        ok);
  }

  Json doc;
  doc["seed"] = seed;
  doc["n_interior"] = cfg.verify.n;
  doc["passed"] = all;
  doc["suites"] = std::move(suites);
  return doc;
}

int run_command(const CommandOptions& opts, std::ostream& log, std::ostream& err) {
  Json manifest;
  manifest["command"] = opts.command;
  std::vector<std::string> outputs;
  std::optional<fs::path> out_dir;
  auto finish = [&](int code, const Json* error) {
    manifest["exit_code"] = code;
    manifest["status"] = code == 0 ? "ok" : "failed";
    if (error != nullptr) manifest["error"] = (*error)["error"];
    if (!out_dir) return;
    try {
      if (error != nullptr) {
        write_text(*out_dir / "error.json", dump(*error));
      } else {
        fs::remove(*out_dir / "error.json");
      }
      manifest["outputs"] = outputs;
      write_text(*out_dir / "run.json", dump(manifest));
    } catch (const std::exception& e) {
      err << "could not write run.json: " << e.what() << "\n";
    }
  };
  try {
    static const char* commands[] = {"solve", "sweep", "threshold", "eigen", "verify"};
    if (std::find(std::begin(commands), std::end(commands), opts.command) == std::end(commands)) {
      throw ConfigError("unknown command '" + opts.command + "'", 0);
    }
    RunConfig cfg = build_run_config(ConfigFile::load(opts.config));
    if (opts.seed) cfg.seed = *opts.seed;
    out_dir = opts.out.value_or(fs::path(cfg.output));
    fs::create_directories(*out_dir);

    manifest["seed"] = cfg.seed;
    manifest["jobs"] = opts.jobs;
    manifest["exploratory"] = opts.exploratory;
    manifest["kernels"] = std::string(simd::isa_name(simd::active_kernels().isa));
    manifest["config"] = cfg.echo;
    manifest["calibrated"] = calibrated_json();

    Run run{cfg, opts, *out_dir, manifest, outputs, log};
    int code = 0;
    if (opts.command == "solve") {
      code = cmd_solve(run);
    } else if (opts.command == "sweep") {
      code = cmd_sweep(run);
    } else if (opts.command == "threshold") {
      code = cmd_threshold(run);
    } else if (opts.command == "eigen") {
      code = cmd_eigen(run);
    } else {
      code = cmd_verify(run);
    }
    finish(code, nullptr);
    return code;
  } catch (const std::exception& e) {
    const ExitCode code = exit_code_for(e);
    const Json doc = error_json(e, code);
    err << doc.dump() << "\n";
    finish(static_cast<int>(code), &doc);
    return static_cast<int>(code);
  }
}

}  // namespace singlap::cli
