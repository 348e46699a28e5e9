#pragma once

// Frozen calibration constants, generated by tools/calibrate.cpp.

namespace singlap::calibrated {

inline constexpr unsigned long long seed = 20240917ULL;
inline constexpr double exponents[4] = {1.5, 2, 3, 4};

// Smallest monotonicity-gap ratio over 1e5 seeded pairs in [-10,10]^2.
inline constexpr double simon_cp[4] = {0.23258182718195169, 0.99999999999999978, 0.5000019187962107, 0.25000285380929183};

// Best discrete Hardy constant on the 1023-node interval.
inline constexpr double hardy_ch[4] = {1.7984049509364886, 1.4088059908368387, 1.2065179888600861, 1.1379668746084379};

// Bounds for S(g) over |g| <= d^{-1/2} on the 1023-node interval.
inline constexpr double m_disc[4] = {7.4920160880167108, 2.7371547431624523, 1.6544348712362333, 1.3988348712822181};
inline constexpr double c_prime[4] = {1.8730040220041781, 1.3685773715813068, 1.1698621164826881, 1.1102559731016155};

// Dyadic cutoff threshold for g = 1, g_tilde = -1, p = 2, 1023 nodes.
inline constexpr double eps0_unit_rhs = 0.0625;

// Family d (alpha = q = 1/2), p = 2, h = 0, 511 nodes.
inline constexpr double family_d_lambda_star = 5.3739161544199651e-07;
inline constexpr double family_d_mid_value = 2.8373765480615009e-05;
inline constexpr double family_d_reference_gap = 2.5590138785733436e-06;
inline constexpr double gap_tol = 3.8385208178600156e-06;
inline constexpr double continuity_observed = 0.04226566843684481;
inline constexpr double continuity_k = 0.063398502655267211;

// Family c (a = 1, alpha = 1/2), p = 2, h = 0, 511 nodes, bracket [0.01, 100].
inline constexpr double family_c_lambda0_lo = 78.632117688026185;
inline constexpr double family_c_lambda0_hi = 79.166314745825531;

}  // namespace singlap::calibrated
