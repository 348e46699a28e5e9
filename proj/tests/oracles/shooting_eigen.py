"""Shooting oracle for the first Dirichlet eigenvalue of the 1-D p-Laplacian on (0, 1).

Integrates phi' = |psi|^{1/(p-1)} sgn(psi), psi' = -lam |phi|^{p-2} phi from x = 0 with
phi = 0, psi = 1 and bisects on lam until the flux psi vanishes at x = 1/2 (symmetry).
The value printed for p = 3 is frozen in tests/test_eigen.cpp.
"""
import sys

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq


def flux_at_half(lam, p):
    def rhs(_, y):
        phi, psi = y
        return [np.sign(psi) * abs(psi) ** (1.0 / (p - 1.0)), -lam * np.sign(phi) * abs(phi) ** (p - 1.0)]

    sol = solve_ivp(rhs, (0.0, 0.5), [0.0, 1.0], rtol=1e-12, atol=1e-14, method="DOP853")
    return sol.y[1, -1]


def first_eigenvalue(p):
    # Walk up until the flux at the midpoint first changes sign, then refine.
    lo = 1.0
    while flux_at_half(lo * 1.25, p) > 0.0:
        lo *= 1.25
    return brentq(flux_at_half, lo, lo * 1.25, args=(p,), xtol=1e-12, rtol=1e-14)


if __name__ == "__main__":
    for p in map(float, sys.argv[1:] or ["3"]):
        print(f"p = {p}: lambda1 = {first_eigenvalue(p):.10f}")
