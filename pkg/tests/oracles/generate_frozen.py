"""Regenerate ``frozen.json``: reference values from oracles independent of sdspec.

* Bessel functions: ascending series summed in 60-digit mpmath arithmetic.
* Meridian integrals: mpmath tanh-sinh quadrature after z = z0 + L sin^2 u.
* Round sphere: bisection on the tan form between adjacent poles, in mpmath.
* Curved profile spectrum: scipy DOP853 on the radial equation written in z,
  seeded and read out with two-term Frobenius expansions at the poles.

Run with ``python3 tests/oracles/generate_frozen.py``; it takes about a minute.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import mpmath as mp
import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

mp.mp.dps = 60
OUT = Path(__file__).with_name("frozen.json")


def series_j(n, x):
    x = mp.mpf(x)
    q = -(x / 2) ** 2
    term = (x / 2) ** n / mp.factorial(n)
    s, k = mp.mpf(0), 0
    while True:
        s += term
        k += 1
        term *= q / (k * (k + n))
        if abs(term) < mp.mpf(10) ** -70 * max(abs(s), 1):
            return s


def series_y(n, x):
    """Neumann functions of order 0 and 1 from the logarithmic series."""
    x = mp.mpf(x)
    g = mp.euler
    if n == 0:
        q = -(x / 2) ** 2
        s, term, H, k = mp.mpf(0), mp.mpf(1), mp.mpf(0), 0
        while True:
            s += term * H
            k += 1
            term *= q / (k * k)
            H += mp.mpf(1) / k
            if abs(term * H) < mp.mpf(10) ** -70 and k > 5:
                break
        return 2 / mp.pi * ((mp.log(x / 2) + g) * series_j(0, x) - s)
    # order 1
    q = -(x / 2) ** 2
    s, k = mp.mpf(0), 0
    term = x / 2  # (x/2)^(2k+1) (-1)^k / (k! (k+1)!)
    Hk, Hk1 = mp.mpf(0), mp.mpf(1)
    while True:
        s += term * (Hk + Hk1)
        k += 1
        term *= q / (k * (k + 1))
        Hk += mp.mpf(1) / k
        Hk1 += mp.mpf(1) / (k + 1)
        if abs(term * (Hk + Hk1)) < mp.mpf(10) ** -70 and k > 5:
            break
    return 2 / mp.pi * (mp.log(x / 2) + g) * series_j(1, x) - 2 / (mp.pi * x) - s / mp.pi


def bessel_table():
    xs = [1e-3, 0.1, 0.5, 1.0, 2.5, 5.0, 11.9, 12.0, 12.1, 20.0, 35.0, 50.0]
    rows = []
    for x in xs:
        vals = [series_j(0, x), series_j(1, x), series_y(0, x), series_y(1, x)]
        # cross-check against mpmath's own implementation
        ref = [mp.besselj(0, x), mp.besselj(1, x), mp.bessely(0, x), mp.bessely(1, x)]
        assert all(abs(a - b) < mp.mpf(10) ** -40 * max(1, abs(b)) for a, b in zip(vals, ref))
        rows.append([x] + [float(v) for v in vals])
    return rows


def profile_poly(z0, z1, coeffs):
    return Polynomial(coeffs)


def meridian_integral(z0, z1, coeffs):
    L = mp.mpf(z1) - mp.mpf(z0)
    c = [mp.mpf(v) for v in coeffs]

    def w(z):
        return sum(ci * z ** i for i, ci in enumerate(c))

    def dw(z):
        return sum(i * ci * z ** (i - 1) for i, ci in enumerate(c) if i)

    def dens(u):
        z = z0 + L * mp.sin(u) ** 2
        s2 = mp.sin(2 * u)
        a = w(z) * mp.cos(2 * u) + L / 2 * dw(z) * s2 ** 2
        return L * mp.sqrt(a * a + s2 * s2)

    return mp.quad(dens, [0, mp.pi / 4, mp.pi / 2])


def sphere_tan_roots(h, alpha, window):
    """Roots of tan(pi kappa) = alpha kappa / (2 pi h^2), bisected between poles."""
    h, alpha = mp.mpf(h), mp.mpf(alpha)
    lo, hi = window
    k_lo = mp.sqrt(2 * lo / h ** 2 + 1)
    k_hi = mp.sqrt(2 * hi / h ** 2 + 1)
    roots = []
    j = int(mp.floor(k_lo - 0.5))
    while j - 0.5 < k_hi + 1:
        a, b = mp.mpf(j) - 0.5 + mp.mpf(10) ** -30, mp.mpf(j) + 0.5 - mp.mpf(10) ** -30
        g = lambda k: mp.tan(mp.pi * k) - alpha * k / (2 * mp.pi * h ** 2)  # noqa: E731
        if a > 1 and g(a) < 0 < g(b):
            for _ in range(200):
                m = (a + b) / 2
                if g(m) < 0:
                    a = m
                else:
                    b = m
            E = h ** 2 * (a * a - 1) / 2
            if lo < E < hi:
                roots.append(float(E))
        j += 1
    return roots


class ZFormShooter:
    """Regular-at-z1 solution of 2PQ u'' + (3P'Q - PQ') u' + (E/h^2) Q^2 u = 0."""

    def __init__(self, z0, z1, coeffs, h, alpha):
        self.z0, self.z1, self.h, self.alpha = z0, z1, h, alpha
        w = Polynomial(coeffs)
        P = Polynomial([-z0 * z1, z0 + z1, -1.0]) * w * w
        dP = P.deriv()
        Q = dP * dP + 4 * P
        self.A2, self.A1, self.Q2 = 2 * P * Q, 3 * dP * Q - P * Q.deriv(), Q * Q
        self.a0 = math.sqrt(z1 - z0) * w(z0)
        self.L = z1 - z0

    def _expansion(self, pole, sign, lam, rho):
        """First correction c1 of t^rho (1 + c1 t) at a pole, z = pole + sign t."""
        a2 = [self.A2.deriv(j)(pole) / math.factorial(j) * sign ** j for j in range(3)]
        a1 = [sign * self.A1.deriv(j)(pole) / math.factorial(j) * sign ** j for j in range(2)]
        a0 = lam * self.Q2(pole)
        # coefficient of t^(rho) in the equation for n = 1
        num = a2[2] * rho * (rho - 1) + a1[1] * rho + a0
        den = (1 + rho) * (a2[1] * rho + a1[0])
        return -num / den

    def boundary(self, E, eps=1e-6):
        lam = E / self.h ** 2
        t = eps * self.L
        c1 = self._expansion(self.z1, -1.0, lam, 0.0)
        y0 = [1 + c1 * t, -c1]  # du/dz = -du/dt

        def rhs(z, y):
            return [y[1], -(self.A1(z) * y[1] + lam * self.Q2(z) * y[0]) / self.A2(z)]

        sol = solve_ivp(rhs, (self.z1 - t, self.z0 + t), y0, method="DOP853",
                        rtol=1e-13, atol=1e-14)
        u, du = sol.y[0, -1], sol.y[1, -1]
        r1c = self._expansion(self.z0, 1.0, lam, 0.0)
        r2c = self._expansion(self.z0, 1.0, lam, -0.5)
        R1, R1p = 1 + r1c * t, r1c
        R2 = t ** -0.5 * (1 + r2c * t)
        R2p = -0.5 * t ** -1.5 + 0.5 * r2c * t ** -0.5
        det = R2 * R1p - R1 * R2p
        A = (u * R1p - R1 * du) / det
        B = (R2 * du - u * R2p) / det
        return -4 * math.pi * self.a0 * A, B

    def mismatch(self, E):
        a, b = self.boundary(E)
        k = math.sqrt(2 * E) / self.h
        gamma = 2 * self.alpha / self.h ** 2
        return (a - gamma * b) / (math.hypot(a, 4 * math.pi / k * b)
                                  * math.hypot(1, gamma * k / (4 * math.pi)))

    def roots(self, window, L_geo):
        lo, hi = window
        grid = [lo]
        while grid[-1] < hi:
            E = grid[-1]
            grid.append(min(hi, E + math.pi * self.h * math.sqrt(2 * E) / (8 * L_geo)))
        vals = [self.mismatch(E) for E in grid]
        out = []
        for i in range(len(grid) - 1):
            if vals[i] * vals[i + 1] < 0:
                out.append(brentq(self.mismatch, grid[i], grid[i + 1], xtol=1e-14, rtol=1e-15))
        return out


def main():
    data = {}
    data["bessel"] = {"columns": ["x", "J0", "J1", "Y0", "Y1"], "rows": bessel_table()}
    Lp = meridian_integral(-1, 1, [1, 0.3])
    data["meridian_length"] = {"sphere": float(meridian_integral(-1, 1, [1])),
                               "omega_1_0.3z": float(Lp)}
    data["sphere_distance_minus_0.99"] = float(mp.acos(mp.mpf("0.99")))
    data["sphere_tan_roots"] = []
    for h, ratio in [(0.1, 1.0), (0.1, 0.1), (0.1, 10.0), (0.05, 1.0)]:
        data["sphere_tan_roots"].append({"h": h, "alpha_over_h3": ratio, "window": [1e-3, 0.5],
                                         "E": sphere_tan_roots(h, ratio * h ** 3, (1e-3, 0.5))})
    data["curved_oracle"] = []
    for h, ratio in [(0.1, 1.0), (0.1, 0.0)]:
        sh = ZFormShooter(-1.0, 1.0, [1.0, 0.3], h, ratio * h ** 3)
        data["curved_oracle"].append({"coefficients": [1.0, 0.3], "h": h, "alpha_over_h3": ratio,
                                      "window": [0.05, 0.6], "E": sh.roots((0.05, 0.6), float(Lp))})
    OUT.write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
