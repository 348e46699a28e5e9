#include "singlap/tridiag.hpp"

#include <cmath>

namespace singlap {

bool solve_tridiagonal(const Tridiagonal& a, std::span<double> b) {
  const std::size_t n = a.size();
  if (n == 0) return true;
  std::vector<double> dl = a.sub;
  std::vector<double> d = a.diag;
  std::vector<double> du = a.super;
  std::vector<double> fill(n > 2 ? n - 2 : 0, 0.0);

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) return false;
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < n) {
        fill[i] = du[i + 1];
        du[i + 1] = -fact * fill[i];
      }
      du[i] = temp;
      const double bi = b[i];
      b[i] = b[i + 1];
      b[i + 1] = bi - fact * b[i + 1];
    }
  }
  if (d[n - 1] == 0.0) return false;

  b[n - 1] /= d[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
  for (std::size_t k = n >= 3 ? n - 2 : 0; k-- > 0;) {
    b[k] = (b[k] - du[k] * b[k + 1] - fill[k] * b[k + 2]) / d[k];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(b[i])) return false;
  }
  return true;
}

}  // namespace singlap
