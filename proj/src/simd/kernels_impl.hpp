#pragma once

#include "singlap/simd/kernels.hpp"

namespace singlap::simd::detail {

/// Defined in kernels_avx2.cpp when the AVX2 variant is compiled in.
const KernelTable& avx2_table() noexcept;

}  // namespace singlap::simd::detail
