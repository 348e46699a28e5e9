#include <algorithm>
#include <cmath>

#include "kernels_impl.hpp"

namespace singlap::simd {

namespace {

void edge_flux_scalar(std::span<const double> u, const FluxParams& fp, std::span<double> flux,
                      std::span<double> dflux) {
  const std::size_t edges = u.size() - 1;
  const bool want_d = !dflux.empty();
  for (std::size_t e = 0; e < edges; ++e) {
    const double t = (u[e + 1] - u[e]) * fp.inv_h;
    if (fp.linear) {
      flux[e] = t;
      if (want_d) dflux[e] = 1.0;
      continue;
    }
    const double s = t * t + fp.eps2;
    if (s == 0.0) {
      flux[e] = 0.0;
      if (want_d) dflux[e] = 0.0;
      continue;
    }
    const double m = std::exp(fp.exponent * std::log(s));
    flux[e] = m * t;
    if (want_d) dflux[e] = m * (1.0 + (fp.p - 2.0) * (t * t) / s);
  }
}

double edge_energy_scalar(std::span<const double> u, const FluxParams& fp, std::span<const double> w) {
  const std::size_t edges = u.size() - 1;
  const double offset = fp.eps2 > 0.0 ? std::exp(0.5 * fp.p * std::log(fp.eps2)) : 0.0;
  double sum = 0.0;
  for (std::size_t e = 0; e < edges; ++e) {
    const double t = (u[e + 1] - u[e]) * fp.inv_h;
    const double s = t * t + fp.eps2;
    double term;
    if (fp.linear) {
      term = s;
    } else if (s == 0.0) {
      term = 0.0;
    } else {
      term = std::exp(fp.exponent * std::log(s)) * s - offset;
    }
    sum += w[e] * term;
  }
  return sum / fp.p;
}

double max_abs_diff_scalar(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double weighted_dot_scalar(std::span<const double> a, std::span<const double> b, std::span<const double> w) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i] * w[i];
  return sum;
}

void blend_scalar(std::span<const double> a, std::span<const double> b, double theta, std::span<double> out) {
  const double keep = 1.0 - theta;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = keep * a[i] + theta * b[i];
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{Isa::Scalar,         edge_flux_scalar,    edge_energy_scalar,
                                 max_abs_diff_scalar, weighted_dot_scalar, blend_scalar};
  return table;
}

}  // namespace singlap::simd
