#pragma once

#include <string>
#include <utility>
#include <vector>

#include "singlap/plap.hpp"

namespace singlap {

enum class Family { A, B, C, D, E, F, Custom };

const char* family_tag(Family family) noexcept;

/// c * s^e
struct PowerTerm {
  double coef = 0.0;
  double exponent = 0.0;
};

/// A nonlinearity f : (0, inf) -> R, stored as sum_k c_k s^{e_k} + log_coef * ln s.
class Nonlinearity {
 public:
  /// s^q - s^-beta with beta > 0, q > 0 (q < p - 1 is a growth hypothesis, checked by validation).
  static Nonlinearity family_a(double q, double beta);
  /// s^-beta - s^-alpha with 0 < beta < alpha < 1.
  static Nonlinearity family_b(double beta, double alpha);
  /// a - s^-alpha with a > 0, 0 < alpha < 1.
  static Nonlinearity family_c(double a, double alpha);
  /// s^-alpha + s^q with 0 < alpha < 1, q > 0.
  static Nonlinearity family_d(double alpha, double q);
  /// s^-alpha with 0 < alpha < 1.
  static Nonlinearity family_e(double alpha);
  /// ln s.
  static Nonlinearity family_f();
  /// Unrestricted sum of powers plus a logarithm; no range checks.
  static Nonlinearity custom(std::vector<PowerTerm> terms, double log_coef = 0.0);

  /// Throws DomainError unless s > 0.
  double operator()(double s) const;
  double derivative(double s) const;

  Family family() const noexcept { return family_; }
  const char* tag() const noexcept { return family_tag(family_); }
  /// Named family parameters in declaration order (for manifests).
  const std::vector<std::pair<std::string, double>>& parameters() const noexcept { return params_; }
  const std::vector<PowerTerm>& terms() const noexcept { return terms_; }
  double log_coef() const noexcept { return log_coef_; }

 private:
  Nonlinearity(Family family, std::vector<PowerTerm> terms, double log_coef,
               std::vector<std::pair<std::string, double>> params);

  Family family_;
  std::vector<PowerTerm> terms_;
  double log_coef_;
  std::vector<std::pair<std::string, double>> params_;
};

double eval_f(const Nonlinearity& f, double s);

struct HypothesisCheck {
  std::string name;
  bool passed = false;
  /// Sample point where the check failed (or the deciding sample when it passed).
  double witness = 0.0;
  std::string detail;
};

/// Bounds |f(s)| <= eps_bar s^{p-1} for s > A1 and |f(s)| <= C / s^beta for s <= A1.
struct GrowthBounds {
  double Lambda = 0.0;
  double eps_bar = 0.0;
  double A1 = 0.0;
  double C = 0.0;
};

struct AssumptionReport {
  double beta = 0.0;
  /// f(s) >= a_const / s^beta for sampled s > A.
  double a_const = 0.0;
  double A = 0.0;
  /// f(s) > -b_const / s^beta for all sampled s.
  double b_const = 0.0;
  /// s^beta |f(s)| <= C_small for sampled s <= 1.
  double C_small = 0.0;
  std::vector<HypothesisCheck> checks;
  std::vector<GrowthBounds> eps_bar_table;

  bool passed() const noexcept;
  /// First failing check, or nullptr.
  const HypothesisCheck* first_failure() const noexcept;
};

/// Dyadic sample s_j = 2^{j/16}, j = -320..320, used by every estimate.
std::vector<double> assumption_samples();

/// Estimates beta, a, A, b and C_small by sampling and checks the growth and
/// singularity hypotheses. Failing hypotheses are reported, never thrown.
AssumptionReport validate_assumptions(const Nonlinearity& f, PValue p);

/// A1 and C for the given eps_bar (samples are extended upward when needed).
GrowthBounds growth_bounds(const Nonlinearity& f, PValue p, double beta, double Lambda, double eps_bar);

/// Copy of the report with the growth bounds for (Lambda, eps_bar) added to the table.
AssumptionReport with_growth_bounds(const AssumptionReport& report, const Nonlinearity& f, PValue p, double Lambda,
                                    double eps_bar);

}  // namespace singlap
