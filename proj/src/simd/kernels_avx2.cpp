// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after the runtime feature check in dispatch.cpp.

#include <immintrin.h>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>

#include "kernels_impl.hpp"

namespace singlap::simd {

namespace {

constexpr double kLn2Hi = 6.93145751953125e-1;
constexpr double kLn2Lo = 1.42860682030941723212e-6;
constexpr double kLog2e = 1.4426950408889634073599;
constexpr double kSqrt2 = 1.41421356237309504880;

inline __m256d int64_to_double_small(__m256i v) {
  // Exact for 0 <= v < 2^52.
  const __m256i magic_i = _mm256_set1_epi64x(0x4330000000000000LL);
  const __m256d magic_d = _mm256_set1_pd(4503599627370496.0);
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(v, magic_i)), magic_d);
}

/// Natural log for positive normal inputs.
/// x = m 2^k with m in (sqrt2/2, sqrt2]; log m = 2 atanh(s), s = (m-1)/(m+1), |s| <= 0.1716.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  __m256d k = _mm256_sub_pd(int64_to_double_small(_mm256_srli_epi64(bits, 52)), _mm256_set1_pd(1023.0));

  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  k = _mm256_add_pd(k, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d z = _mm256_mul_pd(s, s);
  // sum_{j=0}^{11} z^j / (2j + 1)
  __m256d poly = _mm256_set1_pd(1.0 / 23.0);
  poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 21.0));
  poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 19.0));
  poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 17.0));
  poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 15.0));
  poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 13.0));
  poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 11.0));
  poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 9.0));
  poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 7.0));
  poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 5.0));
  poly = _mm256_fmadd_pd(poly, z, _mm256_set1_pd(1.0 / 3.0));
  // 2 s (1 + z poly) = 2s + 2 s z poly
  const __m256d two_s = _mm256_add_pd(s, s);
  const __m256d log_m = _mm256_fmadd_pd(_mm256_mul_pd(two_s, z), poly, two_s);
  const __m256d lo = _mm256_fmadd_pd(k, _mm256_set1_pd(kLn2Lo), log_m);
  return _mm256_fmadd_pd(k, _mm256_set1_pd(kLn2Hi), lo);
}

/// e^y; underflows to 0 below -708, inputs above 709 are clamped.
inline __m256d exp_pd(__m256d y) {
  const __m256d tiny = _mm256_cmp_pd(y, _mm256_set1_pd(-708.0), _CMP_LT_OQ);
  y = _mm256_min_pd(_mm256_max_pd(y, _mm256_set1_pd(-708.0)), _mm256_set1_pd(709.0));
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(y, _mm256_set1_pd(kLog2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Hi), y);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Lo), r);
  // Taylor polynomial of degree 13; |r| <= 0.347 keeps the truncation below 1e-17.
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  const __m256i ni = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
  const __m256i scale_bits = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(scale_bits));
  return _mm256_andnot_pd(tiny, result);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

/// True if any lane of s is below the smallest normal double (the log reduction
/// assumes normal inputs); such blocks take the scalar path.
inline bool has_subnormal(__m256d s) {
  const __m256d low = _mm256_cmp_pd(s, _mm256_set1_pd(DBL_MIN), _CMP_LT_OQ);
  const __m256d nonzero = _mm256_cmp_pd(s, _mm256_setzero_pd(), _CMP_NEQ_OQ);
  return _mm256_movemask_pd(_mm256_and_pd(low, nonzero)) != 0;
}

void edge_flux_avx2(std::span<const double> u, const FluxParams& fp, std::span<double> flux,
                    std::span<double> dflux) {
  const std::size_t edges = u.size() - 1;
  const bool want_d = !dflux.empty();
  const __m256d inv_h = _mm256_set1_pd(fp.inv_h);
  std::size_t e = 0;
  if (fp.linear) {
    for (; e + 4 <= edges; e += 4) {
      const __m256d t = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(&u[e + 1]), _mm256_loadu_pd(&u[e])), inv_h);
      _mm256_storeu_pd(&flux[e], t);
      if (want_d) _mm256_storeu_pd(&dflux[e], _mm256_set1_pd(1.0));
    }
  } else {
    const __m256d eps2 = _mm256_set1_pd(fp.eps2);
    const __m256d expo = _mm256_set1_pd(fp.exponent);
    const __m256d pm2 = _mm256_set1_pd(fp.p - 2.0);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    for (; e + 4 <= edges; e += 4) {
      const __m256d t = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(&u[e + 1]), _mm256_loadu_pd(&u[e])), inv_h);
      const __m256d t2 = _mm256_mul_pd(t, t);
      const __m256d s = _mm256_add_pd(t2, eps2);
      if (has_subnormal(s)) {
        scalar_kernels().edge_flux(u.subspan(e, 5), fp, flux.subspan(e, 4),
                                   want_d ? dflux.subspan(e, 4) : std::span<double>{});
        continue;
      }
      const __m256d is_zero = _mm256_cmp_pd(s, zero, _CMP_EQ_OQ);
      const __m256d safe_s = _mm256_blendv_pd(s, one, is_zero);
      const __m256d m = _mm256_andnot_pd(is_zero, exp_pd(_mm256_mul_pd(expo, log_pd(safe_s))));
      _mm256_storeu_pd(&flux[e], _mm256_mul_pd(m, t));
      if (want_d) {
        const __m256d ratio = _mm256_div_pd(t2, safe_s);
        _mm256_storeu_pd(&dflux[e], _mm256_mul_pd(m, _mm256_fmadd_pd(pm2, ratio, one)));
      }
    }
  }
  if (e < edges) {
    scalar_kernels().edge_flux(u.subspan(e), fp, flux.subspan(e), want_d ? dflux.subspan(e) : std::span<double>{});
  }
}

double edge_energy_avx2(std::span<const double> u, const FluxParams& fp, std::span<const double> w) {
  const std::size_t edges = u.size() - 1;
  const double offset = fp.eps2 > 0.0 ? std::exp(0.5 * fp.p * std::log(fp.eps2)) : 0.0;
  const __m256d inv_h = _mm256_set1_pd(fp.inv_h);
  const __m256d eps2 = _mm256_set1_pd(fp.eps2);
  const __m256d expo = _mm256_set1_pd(fp.exponent);
  const __m256d off = _mm256_set1_pd(offset);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = zero;
  double tail = 0.0;
  std::size_t e = 0;
  for (; e + 4 <= edges; e += 4) {
    const __m256d t = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(&u[e + 1]), _mm256_loadu_pd(&u[e])), inv_h);
    const __m256d s = _mm256_fmadd_pd(t, t, eps2);
    __m256d term;
    if (fp.linear) {
      term = s;
    } else {
      if (has_subnormal(s)) {
        tail += scalar_kernels().edge_energy(u.subspan(e, 5), fp, w.subspan(e, 4)) * fp.p;
        continue;
      }
      const __m256d is_zero = _mm256_cmp_pd(s, zero, _CMP_EQ_OQ);
      const __m256d safe_s = _mm256_blendv_pd(s, one, is_zero);
      const __m256d m = exp_pd(_mm256_mul_pd(expo, log_pd(safe_s)));
      term = _mm256_andnot_pd(is_zero, _mm256_fmsub_pd(m, s, off));
    }
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(&w[e]), term, acc);
  }
  double sum = hsum(acc) + tail;
  if (e < edges) sum += scalar_kernels().edge_energy(u.subspan(e), fp, w.subspan(e)) * fp.p;
  return sum / fp.p;
}

double max_abs_diff_avx2(std::span<const double> a, std::span<const double> b) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= a.size(); i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i]));
    acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign, d));
  }
  double m = hmax(acc);
  for (; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double weighted_dot_avx2(std::span<const double> a, std::span<const double> b, std::span<const double> w) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= a.size(); i += 4) {
    const __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i]));
    acc = _mm256_fmadd_pd(ab, _mm256_loadu_pd(&w[i]), acc);
  }
  double sum = hsum(acc);
  for (; i < a.size(); ++i) sum += a[i] * b[i] * w[i];
  return sum;
}

void blend_avx2(std::span<const double> a, std::span<const double> b, double theta, std::span<double> out) {
  const __m256d keep = _mm256_set1_pd(1.0 - theta);
  const __m256d th = _mm256_set1_pd(theta);
  std::size_t i = 0;
  for (; i + 4 <= a.size(); i += 4) {
    const __m256d r = _mm256_fmadd_pd(th, _mm256_loadu_pd(&b[i]), _mm256_mul_pd(keep, _mm256_loadu_pd(&a[i])));
    _mm256_storeu_pd(&out[i], r);
  }
  for (; i < a.size(); ++i) out[i] = (1.0 - theta) * a[i] + theta * b[i];
}

}  // namespace

namespace detail {

const KernelTable& avx2_table() noexcept {
  static const KernelTable table{Isa::Avx2,        edge_flux_avx2,    edge_energy_avx2,
                                 max_abs_diff_avx2, weighted_dot_avx2, blend_avx2};
  return table;
}

}  // namespace detail

}  // namespace singlap::simd
