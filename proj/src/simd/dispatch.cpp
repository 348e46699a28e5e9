#include <atomic>
#include <cmath>

#include "kernels_impl.hpp"

namespace singlap::simd {

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Avx2:
      return "avx2";
    case Isa::Scalar:
      break;
  }
  return "scalar";
}

FluxParams make_flux_params(double p, double spacing, double eps_reg) noexcept {
  FluxParams fp;
  fp.inv_h = 1.0 / spacing;
  fp.p = p;
  fp.linear = p == 2.0;
  fp.exponent = 0.5 * (p - 2.0);
  fp.eps2 = fp.linear ? 0.0 : eps_reg * eps_reg;
  return fp;
}

const KernelTable* avx2_kernels() noexcept {
#if defined(SINGLAP_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* detect() noexcept {
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{detect()};
  return slot;
}

}  // namespace

const KernelTable& active_kernels() noexcept { return *active_slot().load(std::memory_order_acquire); }

Isa select_isa(Isa requested) noexcept {
  const KernelTable* table = &scalar_kernels();
  if (requested == Isa::Avx2) {
    if (const KernelTable* t = avx2_kernels()) table = t;
  }
  active_slot().store(table, std::memory_order_release);
  return table->isa;
}

}  // namespace singlap::simd
