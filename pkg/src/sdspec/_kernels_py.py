"""Pure-Python implementations of the hot kernels.

These are the reference versions; ``_kernels.pyx`` mirrors them line for line
and is preferred when it has been compiled.
"""
from __future__ import annotations

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286060651209
X_SWITCH = 12.0

_TWO_OVER_PI = 2.0 / math.pi


def poly_shift(coeffs, center, sign=1.0):
    """Coefficients (ascending) of ``p(center + sign * t)`` in powers of t."""
    c = [float(v) for v in coeffs]
    n = len(c)
    # repeated synthetic division = Taylor shift
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] += center * c[j + 1]
    s = 1.0
    for j in range(n):
        c[j] *= s
        s *= sign
    return np.array(c)


def series_coefficients(a2, a1, a0, rho, c0, c1, nterms):
    """Coefficients of a local series solution of ``a2 u'' + a1 u' + a0 u = 0``.

    The polynomial coefficients are given in powers of the local variable t.
    If ``a2[0] != 0`` the expansion point is ordinary (rho must be 0 and both
    c0, c1 are used); otherwise it is a regular singular point with exponent
    ``rho`` and only c0 is used.
    """
    n2, n1, n0 = len(a2), len(a1), len(a0)
    c = [0.0] * nterms
    c[0] = c0
    if a2[0] != 0.0:
        if nterms > 1:
            c[1] = c1
        for m in range(2, nterms):
            acc = 0.0
            for j in range(1, min(n2, m + 1)):
                k = m - j
                acc += a2[j] * k * (k - 1) * c[k]
            for j in range(0, min(n1, m)):
                k = m - 1 - j
                acc += a1[j] * k * c[k]
            for j in range(0, min(n0, m - 1)):
                acc += a0[j] * c[m - 2 - j]
            c[m] = -acc / (a2[0] * m * (m - 1))
    else:
        lead1 = a2[1] if n2 > 1 else 0.0
        for n in range(1, nterms):
            acc = 0.0
            for j in range(2, min(n2, n + 2)):
                k = n + 1 - j
                acc += a2[j] * (k + rho) * (k + rho - 1.0) * c[k]
            for j in range(1, min(n1, n + 1)):
                k = n - j
                acc += a1[j] * (k + rho) * c[k]
            for j in range(0, min(n0, n)):
                acc += a0[j] * c[n - 1 - j]
            denom = (n + rho) * (lead1 * (n + rho - 1.0) + a1[0])
            c[n] = -acc / denom
    return np.array(c)


def series_eval(c, rho, t):
    """Evaluate ``t**rho * sum c_n t**n`` and its t-derivative.

    Returns ``(u, du, tail)`` where ``tail`` is the largest of the last three
    terms relative to the sum of absolute terms.
    """
    n = len(c)
    u = 0.0
    du = 0.0
    scale = 0.0
    tn = 1.0
    last = [0.0, 0.0, 0.0]
    for k in range(n):
        term = c[k] * tn
        u += term
        scale += abs(term)
        if t != 0.0:
            du += (k + rho) * term / t
        elif k == 1:
            du += c[1]
        last[k % 3] = abs(term)
        tn *= t
    tail = max(last) / scale if scale > 0.0 else 0.0
    if rho != 0.0:
        p = t ** rho
        u *= p
        du *= p
    return u, du, tail


def _small_series(x):
    q = 0.25 * x * x
    j0 = 0.0
    j1 = 0.0
    s0 = 0.0
    s1 = 0.0
    t0 = 1.0
    t1 = 1.0
    harm = 0.0
    k = 0
    while True:
        psi1 = harm - EULER_GAMMA
        psi2 = harm + 1.0 / (k + 1) - EULER_GAMMA
        j0 += t0
        j1 += t1
        s0 += 2.0 * psi1 * t0
        s1 += (psi1 + psi2) * t1
        if k > 3 and abs(t0) < 1e-18 and abs(t1) < 1e-18:
            break
        k += 1
        harm += 1.0 / k
        t0 *= -q / (k * k)
        t1 *= -q / (k * (k + 1))
    j1 *= 0.5 * x
    return j0, j1, s0, s1


def _hankel_pq(order, x):
    mu = 4.0 * order * order
    p = 0.0
    q = 0.0
    term = 1.0
    prev = math.inf
    k = 0
    while abs(term) < prev:
        sgn = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p += sgn * term
        else:
            q += sgn * term
        prev = abs(term)
        if prev < 1e-17:
            break
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
    return p, q


def bessel01_series(x):
    """``(J0, J1, Y0, Y1)`` from the ascending series (any x > 0)."""
    j0, j1, s0, s1 = _small_series(x)
    lg = math.log(0.5 * x)
    y0 = _TWO_OVER_PI * lg * j0 - s0 / math.pi
    y1 = _TWO_OVER_PI * lg * j1 - _TWO_OVER_PI / x - 0.5 * x * s1 / math.pi
    return j0, j1, y0, y1


def bessel01_asymptotic(x):
    """``(J0, J1, Y0, Y1)`` from the Hankel expansion summed to its smallest term."""
    amp = math.sqrt(_TWO_OVER_PI / x)
    p0, q0 = _hankel_pq(0.0, x)
    p1, q1 = _hankel_pq(1.0, x)
    c0 = x - 0.25 * math.pi
    c1 = x - 0.75 * math.pi
    cos0, sin0 = math.cos(c0), math.sin(c0)
    cos1, sin1 = math.cos(c1), math.sin(c1)
    return (amp * (p0 * cos0 - q0 * sin0), amp * (p1 * cos1 - q1 * sin1),
            amp * (p0 * sin0 + q0 * cos0), amp * (p1 * sin1 + q1 * cos1))


def bessel01(x):
    """Return ``(J0, J1, Y0, Y1)`` at x >= 0 (Y values are -inf at 0)."""
    if x == 0.0:
        return 1.0, 0.0, -math.inf, -math.inf
    if x < X_SWITCH:
        return bessel01_series(x)
    return bessel01_asymptotic(x)


def bessel01_array(x):
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty((4, flat.size))
    for i, v in enumerate(flat):
        out[:, i] = bessel01(float(v))
    return out.reshape((4,) + x.shape)
