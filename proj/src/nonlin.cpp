#include "singlap/nonlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "singlap/errors.hpp"

namespace singlap {

namespace {

constexpr int kSampleLo = -320;
constexpr int kSampleHi = 320;
constexpr double kSampleStep = 1.0 / 16.0;

double sample(int j) { return std::exp2(j * kSampleStep); }

std::size_t index_of(int j) { return static_cast<std::size_t>(j - kSampleLo); }

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(what);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

const char* family_tag(Family family) noexcept {
  switch (family) {
    case Family::A: return "a";
    case Family::B: return "b";
    case Family::C: return "c";
    case Family::D: return "d";
    case Family::E: return "e";
    case Family::F: return "f";
    case Family::Custom: return "custom";
  }
  return "custom";
}

Nonlinearity::Nonlinearity(Family family, std::vector<PowerTerm> terms, double log_coef,
                           std::vector<std::pair<std::string, double>> params)
    : family_(family), terms_(std::move(terms)), log_coef_(log_coef), params_(std::move(params)) {}

Nonlinearity Nonlinearity::family_a(double q, double beta) {
  require(beta > 0.0 && q > 0.0, "family a requires beta > 0 and q > 0");
  return Nonlinearity(Family::A, {{1.0, q}, {-1.0, -beta}}, 0.0, {{"q", q}, {"beta", beta}});
}

Nonlinearity Nonlinearity::family_b(double beta, double alpha) {
  require(beta > 0.0 && beta < alpha && alpha < 1.0, "family b requires 0 < beta < alpha < 1");
  return Nonlinearity(Family::B, {{1.0, -beta}, {-1.0, -alpha}}, 0.0, {{"beta", beta}, {"alpha", alpha}});
}

Nonlinearity Nonlinearity::family_c(double a, double alpha) {
  require(a > 0.0 && alpha > 0.0 && alpha < 1.0, "family c requires a > 0 and 0 < alpha < 1");
  return Nonlinearity(Family::C, {{a, 0.0}, {-1.0, -alpha}}, 0.0, {{"a", a}, {"alpha", alpha}});
}

Nonlinearity Nonlinearity::family_d(double alpha, double q) {
  require(alpha > 0.0 && alpha < 1.0 && q > 0.0, "family d requires 0 < alpha < 1 and q > 0");
  return Nonlinearity(Family::D, {{1.0, -alpha}, {1.0, q}}, 0.0, {{"alpha", alpha}, {"q", q}});
}

Nonlinearity Nonlinearity::family_e(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "family e requires 0 < alpha < 1");
  return Nonlinearity(Family::E, {{1.0, -alpha}}, 0.0, {{"alpha", alpha}});
}

Nonlinearity Nonlinearity::family_f() { return Nonlinearity(Family::F, {}, 1.0, {}); }

Nonlinearity Nonlinearity::custom(std::vector<PowerTerm> terms, double log_coef) {
  for (const auto& t : terms) require(std::isfinite(t.coef) && std::isfinite(t.exponent), "custom term not finite");
  require(std::isfinite(log_coef), "custom log coefficient not finite");
  std::vector<std::pair<std::string, double>> params;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    params.emplace_back("coef" + std::to_string(k), terms[k].coef);
    params.emplace_back("exp" + std::to_string(k), terms[k].exponent);
  }
  params.emplace_back("log_coef", log_coef);
  return Nonlinearity(Family::Custom, std::move(terms), log_coef, std::move(params));
}

double Nonlinearity::operator()(double s) const {
  if (!(s > 0.0)) throw DomainError("f is defined for s > 0 only, got " + fmt(s));
  double v = log_coef_ != 0.0 ? log_coef_ * std::log(s) : 0.0;
  for (const auto& t : terms_) v += t.exponent == 0.0 ? t.coef : t.coef * std::pow(s, t.exponent);
  return v;
}

double Nonlinearity::derivative(double s) const {
  if (!(s > 0.0)) throw DomainError("f' is defined for s > 0 only, got " + fmt(s));
  double v = log_coef_ / s;
  for (const auto& t : terms_) {
    if (t.exponent != 0.0) v += t.coef * t.exponent * std::pow(s, t.exponent - 1.0);
  }
  return v;
}

double eval_f(const Nonlinearity& f, double s) { return f(s); }

bool AssumptionReport::passed() const noexcept { return first_failure() == nullptr; }

const HypothesisCheck* AssumptionReport::first_failure() const noexcept {
  for (const auto& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

std::vector<double> assumption_samples() {
  std::vector<double> s;
  s.reserve(kSampleHi - kSampleLo + 1);
  for (int j = kSampleLo; j <= kSampleHi; ++j) s.push_back(sample(j));
  return s;
}

AssumptionReport validate_assumptions(const Nonlinearity& f, PValue p) {
  const std::vector<double> s = assumption_samples();
  std::vector<double> fs(s.size());
  AssumptionReport rep;

  HypothesisCheck finite{"finite", true, 0.0, "f finite at every sample"};
  for (std::size_t k = 0; k < s.size(); ++k) {
    fs[k] = f(s[k]);
    if (!std::isfinite(fs[k]) && finite.passed) {
      finite = {"finite", false, s[k], "f not finite"};
    }
  }
  rep.checks.push_back(finite);
  if (!finite.passed) return rep;

  // Singularity exponent from the log-log slope at the two smallest samples.
  const double f0 = std::abs(fs[0]);
  const double f1 = std::abs(fs[1]);
  double beta = 0.0;
  if (f0 > 0.0 && f1 > 0.0) beta = -(std::log(f1) - std::log(f0)) / (std::log(s[1]) - std::log(s[0]));
  beta = std::round(beta * 1000.0) / 1000.0;
  HypothesisCheck singular{"f2_beta_below_one", beta < 1.0, s[0], "estimated beta = " + fmt(beta)};
  rep.beta = std::max(beta, 1e-3);
  rep.checks.push_back(singular);

  auto weighted = [&](std::size_t k) { return std::pow(s[k], rep.beta) * fs[k]; };

  // (f)2(ii): s^beta |f| levels off over the bottom octave of the sample.
  {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t k = 0; k <= 16; ++k) {
      const double v = std::abs(weighted(k));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const bool flat = hi == 0.0 || (lo > 0.0 && hi <= 1.1 * lo);
    rep.checks.push_back({"f2_small_bound", flat, s[0], "s^beta |f| over the bottom octave in [" + fmt(lo) + ", " +
                                                           fmt(hi) + "]"});
  }

  // (f)1: |f| / s^{p-1} decays monotonically over the top decades.
  {
    const std::size_t first = index_of(160);
    HypothesisCheck decay{"f1_growth", true, s.back(), "|f|/s^{p-1} decreasing on [2^10, 2^20]"};
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = first; k < s.size(); ++k) {
      const double ratio = std::abs(fs[k]) / std::pow(s[k], p.value() - 1.0);
      if (ratio > prev * (1.0 + 1e-12)) {
        decay = {"f1_growth", false, s[k], "|f|/s^{p-1} increases at the witness"};
        break;
      }
      prev = ratio;
    }
    if (decay.passed) {
      const double head = std::abs(fs[first]) / std::pow(s[first], p.value() - 1.0);
      if (!(prev <= 0.5 * head)) decay = {"f1_growth", false, s.back(), "|f|/s^{p-1} does not decay"};
    }
    rep.checks.push_back(decay);
  }

  // (f)2(i): f >= a / s^beta eventually.
  double q_top = std::numeric_limits<double>::infinity();
  double q_arg = 0.0;
  for (std::size_t k = index_of(160); k < s.size(); ++k) {
    if (weighted(k) < q_top) {
      q_top = weighted(k);
      q_arg = s[k];
    }
  }
  rep.checks.push_back({"f2_lower", q_top > 0.0, q_arg, "min s^beta f on [2^10, 2^20] = " + fmt(q_top)});

  if (q_top > 0.0) {
    const double r = 1.0 / (p.value() + rep.beta - 1.0);
    // Onset A(a): the sample after the first one from which s^beta f >= a holds throughout.
    auto onset = [&](double a) {
      std::size_t k = s.size();
      while (k > 0 && weighted(k - 1) >= a) --k;
      return k + 1 < s.size() ? s[k + 1] : s.back();
    };
    std::vector<double> candidates{0.95 * q_top};
    for (int k = 1; k <= 160; ++k) candidates.push_back(q_top * std::exp2(-0.25 * k));
    double best = std::numeric_limits<double>::infinity();
    for (double a : candidates) {
      const double A = onset(a);
      // lambda_star scales like A^{1/r} / a.
      const double cost = std::pow(A, 1.0 / r) / a;
      if (cost < best) {
        best = cost;
        rep.a_const = a;
        rep.A = A;
      }
    }
  }

  double neg = 0.0;
  double small = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    neg = std::max(neg, -weighted(k));
    if (s[k] <= 1.0) small = std::max(small, std::abs(weighted(k)));
  }
  rep.b_const = std::max(1e-6, 1.05 * neg);
  rep.C_small = 1.05 * small;
  return rep;
}

GrowthBounds growth_bounds(const Nonlinearity& f, PValue p, double beta, double Lambda, double eps_bar) {
  if (!(eps_bar > 0.0)) throw InvalidArgument("growth_bounds: eps_bar must be positive");
  const double pm1 = p.value() - 1.0;
  auto ok = [&](int j) {
    const double v = sample(j);
    return std::abs(f(v)) <= eps_bar * std::pow(v, pm1);
  };
  // Extend upward until the top of a two-decade window satisfies the bound.
  int top = kSampleHi;
  while (!ok(top)) {
    top += 160;
    if (top > 16 * 1000) throw DomainError("growth_bounds: |f| <= eps_bar s^{p-1} never holds");
  }
  top += 160;
  int j = top;
  while (j > kSampleLo && ok(j - 1)) --j;
  GrowthBounds g;
  g.Lambda = Lambda;
  g.eps_bar = eps_bar;
  g.A1 = sample(j + 1);
  double c = 0.0;
  for (int k = kSampleLo; k <= j + 1; ++k) {
    const double v = sample(k);
    c = std::max(c, std::pow(v, beta) * std::abs(f(v)));
  }
  g.C = 1.05 * c;
  return g;
}

AssumptionReport with_growth_bounds(const AssumptionReport& report, const Nonlinearity& f, PValue p, double Lambda,
                                    double eps_bar) {
  AssumptionReport out = report;
  out.eps_bar_table.push_back(growth_bounds(f, p, report.beta, Lambda, eps_bar));
  return out;
}

}  // namespace singlap
