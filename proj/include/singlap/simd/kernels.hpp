#pragma once

// Data-parallel inner loops of the discrete p-Laplacian.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2+FMA
// variant chosen at runtime from the CPU feature flags. The variants agree to a
// few ulps; tests/test_kernels.cpp holds the equivalence checks.

#include <cstddef>
#include <span>
#include <string_view>

namespace singlap::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// Parameters of the regularized edge flux
///   t = (u[e+1] - u[e]) * inv_h,   m = (t^2 + eps2)^exponent,   flux = m * t
/// with exponent = (p - 2) / 2. `linear` short-circuits p == 2 (m == 1).
struct FluxParams {
  double inv_h = 1.0;
  double exponent = 0.0;
  double eps2 = 0.0;
  double p = 2.0;
  bool linear = true;
};

FluxParams make_flux_params(double p, double spacing, double eps_reg) noexcept;

struct KernelTable {
  Isa isa;

  /// flux[e] = m t and dflux[e] = d(flux)/dt for each edge e < u.size() - 1.
  /// dflux may be empty, in which case only fluxes are written.
  void (*edge_flux)(std::span<const double> u, const FluxParams& fp, std::span<double> flux,
                    std::span<double> dflux);

  /// sum_e w[e] * ((t^2 + eps2)^(p/2) - eps2^(p/2)) / p, the regularized gradient energy.
  double (*edge_energy)(std::span<const double> u, const FluxParams& fp, std::span<const double> w);

  /// max_i |a[i] - b[i]|
  double (*max_abs_diff)(std::span<const double> a, std::span<const double> b);

  /// sum_i a[i] * b[i] * w[i]
  double (*weighted_dot)(std::span<const double> a, std::span<const double> b, std::span<const double> w);

  /// out[i] = (1 - theta) * a[i] + theta * b[i]
  void (*blend)(std::span<const double> a, std::span<const double> b, double theta, std::span<double> out);
};

/// Scalar reference kernels; always available.
const KernelTable& scalar_kernels() noexcept;

/// AVX2 kernels, or nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2_kernels() noexcept;

/// The table used by the library: AVX2 when available, scalar otherwise.
const KernelTable& active_kernels() noexcept;

/// Pin the active table (tests and benchmarks). Requesting an unavailable ISA
/// falls back to scalar. Returns the ISA actually selected.
Isa select_isa(Isa requested) noexcept;

}  // namespace singlap::simd
