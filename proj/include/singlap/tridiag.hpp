#pragma once

#include <span>
#include <vector>

namespace singlap {

/// Tridiagonal matrix with sub[i] = A(i+1, i), diag[i] = A(i, i), super[i] = A(i, i+1).
struct Tridiagonal {
  std::vector<double> sub;
  std::vector<double> diag;
  std::vector<double> super;

  explicit Tridiagonal(std::size_t n = 0) : sub(n > 0 ? n - 1 : 0, 0.0), diag(n, 0.0), super(n > 0 ? n - 1 : 0, 0.0) {}
  std::size_t size() const noexcept { return diag.size(); }
};

/// Gaussian elimination with partial pivoting (the LAPACK gtsv scheme).
/// Overwrites rhs with the solution; returns false on an exactly singular pivot.
bool solve_tridiagonal(const Tridiagonal& a, std::span<double> rhs);

}  // namespace singlap
