"""Profile of a 3D manifold of revolution and its meridian geometry.

The manifold is swept by the profile ``f(z) = sqrt((z1 - z)(z - z0)) * w(z)``
with a polynomial ``w`` positive on ``[z0, z1]``.  Both poles carry a square-root
singularity of ``f``; every meridian integral is evaluated after the change of
variable ``z = z0 + (z1 - z0) sin^2 u`` which makes the integrand analytic on
``[0, pi/2]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from scipy.optimize import brentq

from .errors import DomainError, QuadratureError

Pole = Literal["left", "right"]


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = 134217729.0 * a  # 2**27 + 1
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def horner(coeffs, z):
    """Evaluate ``sum coeffs[j] z**j``; compensated above degree 8."""
    z = np.asarray(z, dtype=float)
    c = coeffs
    if len(c) - 1 <= 8:
        acc = np.full_like(z, c[-1])
        for a in c[-2::-1]:
            acc = acc * z + a
        return acc
    s = np.full_like(z, c[-1])
    err = np.zeros_like(z)
    for a in c[-2::-1]:
        p, pe = _two_prod(s, z)
        s, se = _two_sum(p, a)
        err = err * z + (pe + se)
    return s + err


@dataclass(frozen=True)
class ProfilePolynomial:
    """The factor ``w(z) = sum c_j z**j`` of the profile."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if not coeffs:
            raise ValueError("profile polynomial needs at least one coefficient")
        if len(coeffs) > 1 and coeffs[-1] == 0.0:
            raise ValueError("leading coefficient of the profile polynomial is zero")
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("profile polynomial coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def __call__(self, z):
        return horner(self.coefficients, z)

    def derivative(self, order=1):
        c = list(self.coefficients)
        for _ in range(order):
            c = [j * c[j] for j in range(1, len(c))] or [0.0]
        return _RawPoly(tuple(c))


@dataclass(frozen=True)
class _RawPoly:
    coefficients: tuple

    def __call__(self, z):
        return horner(self.coefficients, z)


@dataclass(frozen=True)
class SurfaceProfile:
    z0: float
    z1: float
    omega: ProfilePolynomial = field(default_factory=lambda: ProfilePolynomial((1.0,)))

    def __post_init__(self):
        if not (math.isfinite(self.z0) and math.isfinite(self.z1)):
            raise ValueError("pole coordinates must be finite")
        if not self.z0 < self.z1:
            raise ValueError(f"need z0 < z1, got z0={self.z0}, z1={self.z1}")

    @classmethod
    def sphere(cls):
        """Unit round 3-sphere: ``f = sqrt(1 - z**2)``."""
        return cls(-1.0, 1.0, ProfilePolynomial((1.0,)))

    @classmethod
    def from_coefficients(cls, z0, z1, coefficients):
        return cls(float(z0), float(z1), ProfilePolynomial(tuple(coefficients)))

    @property
    def length(self):
        return self.z1 - self.z0

    @property
    def pole_slope(self):
        """Coefficient a0 in ``d(z, z0) ~ a0 sqrt(z - z0)``."""
        return math.sqrt(self.length) * float(self.omega(self.z0))

    @property
    def far_pole_slope(self):
        return math.sqrt(self.length) * float(self.omega(self.z1))

    def squared(self):
        """``P = f**2`` as a polynomial."""
        w = Polynomial(self.omega.coefficients)
        return Polynomial([-self.z0 * self.z1, self.z0 + self.z1, -1.0]) * w * w

    @cached_property
    def meridian(self):
        return MeridianMap(self)


def _check_closed(profile, z):
    z = np.asarray(z, dtype=float)
    if np.any(z < profile.z0) or np.any(z > profile.z1) or np.any(~np.isfinite(z)):
        raise DomainError(f"z outside [{profile.z0}, {profile.z1}]")
    return z


def _check_open(profile, z):
    z = np.asarray(z, dtype=float)
    if np.any(z <= profile.z0) or np.any(z >= profile.z1) or np.any(~np.isfinite(z)):
        raise DomainError(
            f"z must lie strictly inside ({profile.z0}, {profile.z1}); "
            "f' diverges like |z - pole|**-1/2 at the poles"
        )
    return z


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def profile_value(profile, z):
    """f(z) on the closed interval."""
    z = _check_closed(profile, z)
    r = np.maximum((profile.z1 - z) * (z - profile.z0), 0.0)
    return _out(np.sqrt(r) * profile.omega(z))


def eval_profile(profile, z):
    """Closed-form ``(f, f', f'')`` at interior points."""
    z = _check_open(profile, z)
    z0, z1 = profile.z0, profile.z1
    w = profile.omega(z)
    w1 = profile.omega.derivative(1)(z)
    w2 = profile.omega.derivative(2)(z)
    r = (z1 - z) * (z - z0)
    r1 = (z1 - z) - (z - z0)
    sr = np.sqrt(r)
    f = sr * w
    fp = r1 * w / (2.0 * sr) + sr * w1
    fpp = (-1.0 / sr - r1 * r1 / (4.0 * r * sr)) * w + r1 * w1 / sr + sr * w2
    return _out(f), _out(fp), _out(fpp)


@dataclass(frozen=True)
class MetricAtPoint:
    g_zz: float
    g_thth: float
    g_phph: float
    sqrt_g: float


def metric_at(profile, z, theta):
    if not abs(theta) < math.pi / 2:
        raise DomainError("|theta| must be < pi/2")
    f, fp, _ = eval_profile(profile, float(z))
    g_zz = fp * fp + 1.0
    c = math.cos(theta)
    return MetricAtPoint(g_zz, f * f, f * f * c * c, f * f * math.sqrt(g_zz) * c)


class MeridianMap:
    """Arc length along the meridian, ``s(z) = int_{z0}^{z} sqrt(f'^2 + 1) dz``.

    With ``z = z0 + L sin^2 u`` the arc-length density in u is
    ``L * sqrt((w cos 2u + (L/2) w' sin^2 2u)^2 + sin^2 2u)``, analytic on
    ``[0, pi/2]``.  It is represented by an adaptively sized Chebyshev series
    and integrated exactly.
    """

    max_degree = 4096
    tol = 5e-14  # rounding floor of the density evaluation

    def __init__(self, profile):
        self.profile = profile
        L = profile.length
        w = profile.omega
        dw = profile.omega.derivative(1)

        def density(u):
            z = profile.z0 + L * np.sin(u) ** 2
            s2 = np.sin(2.0 * u)
            a = w(z) * np.cos(2.0 * u) + 0.5 * L * dw(z) * s2 * s2
            return L * np.sqrt(a * a + s2 * s2)

        self._density = density
        deg = 32
        while True:
            cheb = Chebyshev.interpolate(density, deg, domain=[0.0, math.pi / 2])
            coef = np.abs(cheb.coef)
            tail = coef[-4:].max() / coef.max()
            if tail < self.tol or deg >= self.max_degree:
                break
            deg *= 2
        self.degree = deg
        self.error_estimate = float(coef[-8:].sum()) * (math.pi / 2)
        if tail > 1e-10:
            raise QuadratureError(
                f"meridian length quadrature did not converge (tail {tail:.2e})",
                achieved=self.error_estimate,
            )
        keep = np.nonzero(coef > 1e-17 * coef.max())[0].max() + 1
        cheb = Chebyshev(cheb.coef[:keep], domain=cheb.domain)
        self._cheb = cheb
        self._integral = cheb.integ(lbnd=0.0)
        self.total = float(self._integral(math.pi / 2))

    def angle(self, z):
        z = np.asarray(z, dtype=float)
        x = np.clip((z - self.profile.z0) / self.profile.length, 0.0, 1.0)
        return np.arcsin(np.sqrt(x))

    _near = 0.25  # angular width of the pole caps integrated directly
    _gl = np.polynomial.legendre.leggauss(24)

    def _direct(self, a, width):
        """Gauss-Legendre integral of the density over ``[a, a + width]`` (short intervals)."""
        x, w = self._gl
        a = np.asarray(a, dtype=float)[..., None]
        half = 0.5 * np.asarray(width, dtype=float)[..., None]
        nodes = a + half * (x + 1.0)
        return np.sum(w * self._density(nodes), axis=-1) * half[..., 0]

    def _s_of_u(self, u):
        """Arc length from the left pole, at full relative precision near it."""
        u = np.asarray(u, dtype=float)
        out = np.asarray(self._integral(u), dtype=float)
        near = u < self._near
        if np.any(near):
            out = np.where(near, self._direct(np.zeros_like(u), np.where(near, u, 0.0)), out)
        return out

    def _s_to_right(self, z):
        z = np.asarray(z, dtype=float)
        top = math.pi / 2
        # complementary angle taken from z1 - z, which is exact near z1
        v = np.arcsin(np.sqrt(np.clip((self.profile.z1 - z) / self.profile.length, 0.0, 1.0)))
        out = self.total - np.asarray(self._integral(top - v), dtype=float)
        near = v < self._near
        if np.any(near):
            vn = np.where(near, v, 0.0)
            out = np.where(near, self._direct(top - vn, vn), out)
        return out

    def arclength(self, z):
        """Distance from the left pole."""
        return self._s_of_u(self.angle(z))

    def arclength_to_right(self, z):
        """Distance to the right pole."""
        return self._s_to_right(z)

    def dz_ds(self, z):
        return 1.0 / np.sqrt(1.0 + eval_profile(self.profile, z)[1] ** 2)

    def z_of_s(self, s):
        """Invert ``s(z)`` by Newton iteration in the angle variable."""
        s = np.asarray(s, dtype=float)
        if np.any(s < -1e-14) or np.any(s > self.total * (1 + 1e-14)):
            raise DomainError("arc length outside [0, meridian length]")
        u = np.clip(s / self.total, 0.0, 1.0) * (math.pi / 2)
        for _ in range(60):
            du = (self._integral(u) - s) / self._cheb(u)
            u = np.clip(u - du, 0.0, math.pi / 2)
            if np.all(np.abs(du) < 1e-15):
                break
        # polish near the poles where the Chebyshev antiderivative has only absolute accuracy
        near = (u < self._near) & (u > 0)
        if np.any(near):
            for _ in range(3):
                du = (self._s_of_u(u) - s) / self._density(u)
                u = np.where(near, np.clip(u - du, 0.0, math.pi / 2), u)
        z = self.profile.z0 + self.profile.length * np.sin(u) ** 2
        return _out(np.clip(z, self.profile.z0, self.profile.z1))


def meridian_length(profile):
    return profile.meridian.total


def geodesic_distance_from_pole(profile, z, pole: Pole = "left"):
    z = _check_closed(profile, z)
    m = profile.meridian
    if pole == "left":
        d = m.arclength(z)
    elif pole == "right":
        d = m.arclength_to_right(z)
    else:
        raise ValueError(f"pole must be 'left' or 'right', got {pole!r}")
    return _out(np.maximum(d, 0.0))


@dataclass
class ValidationReport:
    passed: bool
    z_order_ok: bool
    omega_min: float
    omega_min_at: float
    f_min_interior: float
    violations: list = field(default_factory=list)

    def lines(self):
        out = [
            f"status: {'pass' if self.passed else 'fail'}",
            f"z0 < z1: {self.z_order_ok}",
            f"min omega on [z0, z1]: {self.omega_min:.12g} at z = {self.omega_min_at:.12g}",
            f"min f on interior samples: {self.f_min_interior:.12g}",
        ]
        out += [f"violation: {v}" for v in self.violations]
        return out


def validate_profile(profile, samples=512):
    """Check that w > 0 on [z0, z1] (dense samples plus critical points)."""
    z0, z1 = profile.z0, profile.z1
    if not z0 < z1:
        return ValidationReport(False, False, math.nan, math.nan, math.nan,
                                ["z0 must be smaller than z1"])
    w = profile.omega
    dw = profile.omega.derivative(1)
    grid = np.linspace(z0, z1, samples)
    cand = list(grid)
    dvals = dw(grid)
    for a, b, fa, fb in zip(grid[:-1], grid[1:], dvals[:-1], dvals[1:]):
        if fa == 0.0:
            cand.append(a)
        elif fa * fb < 0.0:
            cand.append(brentq(lambda x: float(dw(x)), a, b, xtol=1e-14))
    cand = np.array(sorted(cand))
    wv = w(cand)
    i = int(np.argmin(wv))
    violations = []
    signs = np.sign(wv)
    for j in range(len(cand) - 1):
        if signs[j] > 0 and signs[j + 1] <= 0 or signs[j] <= 0 and signs[j + 1] > 0:
            a, b = cand[j], cand[j + 1]
            if wv[j] == 0.0:
                root = a
            elif wv[j + 1] == 0.0:
                root = b
            else:
                root = brentq(lambda x: float(w(x)), a, b, xtol=1e-14)
            violations.append(f"omega changes sign near z = {root:.12g}")
    if wv[i] <= 0.0 and not violations:
        violations.append(f"omega <= 0 at z = {cand[i]:.12g}")
    inner = grid[1:-1]
    fmin = float(np.min(np.sqrt((z1 - inner) * (inner - z0)) * w(inner)))
    return ValidationReport(
        passed=not violations and float(wv[i]) > 0.0,
        z_order_ok=True,
        omega_min=float(wv[i]),
        omega_min_at=float(cand[i]),
        f_min_interior=fmin,
        violations=violations,
    )
