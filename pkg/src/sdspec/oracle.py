"""Independent reference spectrum by shooting the radial ODE.

The m = 0 radial equation is multiplied through to polynomial form.  With
``P = f^2`` and ``Q = P'^2 + 4P`` it reads

    2 P Q u'' + (3 P' Q - P Q') u' + (E / h^2) Q^2 u = 0,

so it can be integrated by analytic continuation: local Taylor series whose
coefficients follow from a linear recurrence, each step kept inside half the
distance to the nearest complex singularity.  The poles z0, z1 are regular
singular points and are handled by Frobenius series.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from . import kernels
from .errors import DomainError, NumericalError
from .localfield import BoundaryData, extract_boundary_data
from .quantize import SpectralParams
from .surface import meridian_length

INDICIAL_BETA = 1.5  # coefficient of rho in the indicial polynomial at either pole


def pole_drift_limit(profile, offsets=(1e-3, 1e-4, 1e-5)):
    """``beta = lim (z - z0) (2 f'/f - f' f''/(f'^2 + 1))`` by Richardson extrapolation."""
    from .localfield import _radial_drift

    t = np.array(offsets) * profile.length
    vals = [(ti * _radial_drift(profile, profile.z0 + ti)) for ti in t]
    table = list(vals)
    for level in range(1, len(vals)):
        table = [((t[i] / t[i + 1]) ** level * table[i + 1] - table[i])
                 / ((t[i] / t[i + 1]) ** level - 1.0) for i in range(len(table) - 1)]
    return float(table[0])


def indicial_exponents(m=0, convention="direct", profile=None):
    """Frobenius exponents at a pole.

    ``"direct"`` solves ``rho (rho - 1) + beta rho - m (m + 1) / 4 = 0``, the
    indicial equation of the radial operator itself; beta = 3/2 for every
    admissible profile (pass ``profile`` to measure it), giving
    ``{m/2, -(m+1)/2}``.  ``"paper"`` returns ``(-1 +- sqrt(1 + m (m + 1))) / 2``.
    """
    if m < 0 or int(m) != m:
        raise DomainError("m must be a non-negative integer")
    if convention in ("direct", "derived"):
        beta = INDICIAL_BETA if profile is None else pole_drift_limit(profile)
        b = beta - 1.0
        disc = math.sqrt(b * b + m * (m + 1))
        return ((-b + disc) / 2.0, (-b - disc) / 2.0)
    if convention == "paper":
        disc = math.sqrt(1.0 + m * (m + 1))
        return ((-1.0 + disc) / 2.0, (-1.0 - disc) / 2.0)
    raise ValueError(f"unknown convention {convention!r}")


class RadialODE:
    """Polynomial coefficients of the radial equation for one profile."""

    def __init__(self, profile):
        self.profile = profile
        P = profile.squared()
        dP = P.deriv()
        Q = dP * dP + 4.0 * P
        Q = Q.trim(1e-14 * np.max(np.abs(Q.coef)))
        self.P, self.Q = P, Q
        self.a2 = (2.0 * P * Q).coef
        self.a1 = (3.0 * dP * Q - P * Q.deriv()).coef
        self.q2 = (Q * Q).coef
        sing = [complex(profile.z0), complex(profile.z1)]
        w = Polynomial(profile.omega.coefficients)
        if w.degree() > 0:
            sing += [complex(r) for r in w.roots()]
        if Q.degree() > 0:
            sing += [complex(r) for r in Q.roots()]
        self.singularities = np.array(sing)
        # the same polynomials re-expanded about each pole, in the distance
        # from that pole, so that P stays relatively accurate next to it
        self._anchored = {}
        for pole, direction in ((profile.z0, 1.0), (profile.z1, -1.0)):
            polys = [kernels.poly_shift(c, pole, direction) for c in (self.a2, self.a1, self.q2)]
            polys[0][0] = 0.0
            self._anchored[direction] = (pole, polys)

    def local(self, center, sign, lam, pole=False):
        """Coefficients in ``t`` with ``z = center + sign * t``.

        Expansions are taken from the nearer pole's anchored polynomials, so
        the vanishing constant term of the leading coefficient is exact at the
        pole and relatively accurate close to it.  ``pole`` is kept for
        callers that centre exactly on a pole.
        """
        z0, z1 = self.profile.z0, self.profile.z1
        direction = 1.0 if center - z0 <= z1 - center else -1.0
        anchor, (c2, c1, cq) = self._anchored[direction]
        delta = (center - anchor) * direction
        s = sign * direction
        a2 = kernels.poly_shift(c2, delta, s)
        if pole or delta == 0.0:
            a2[0] = 0.0
        a1 = sign * kernels.poly_shift(c1, delta, s)
        a0 = lam * kernels.poly_shift(cq, delta, s)
        return a2, a1, a0

    def radius(self, z):
        """Distance from z to the nearest singular point of the equation."""
        return float(np.min(np.abs(self.singularities - z)))

    def radius_excluding(self, pole):
        """Convergence radius of a Frobenius series centred on ``pole``."""
        others = self.singularities[np.abs(self.singularities - pole) > 1e-12]
        return float(np.min(np.abs(others - pole))) if others.size else math.inf

    def wavenumber(self, z, lam):
        """Local oscillation rate ``sqrt(2 lam g1)`` in z, ``g1 = Q / (4P)``."""
        P = self.P(z)
        return math.sqrt(2.0 * lam * max(self.Q(z), 0.0) / (4.0 * P)) if P > 0 else math.inf


@dataclass(frozen=True)
class FrobeniusSeed:
    """Regular Frobenius series at the far pole, in ``t = z1 - z``."""

    expansion_point: float
    coefficients: np.ndarray
    order: int
    exponent: float = 0.0
    equation: tuple = field(default=(), repr=False)

    def evaluate(self, t, tol=1e-8):
        """``(u, du/dz)`` at ``z = z1 - t``; raises if the series has not converged."""
        u, du, tail = kernels.series_eval(self.coefficients, self.exponent, float(t))
        if not (math.isfinite(u) and math.isfinite(du)) or tail > tol:
            raise NumericalError(
                "Frobenius seed did not converge at the start offset; use a smaller offset",
                achieved=tail)
        return u, -du

    def recurrence_residual(self):
        """Largest relative defect of the series coefficients in the ODE recurrence.

        Each power ``t**n`` (n < order) of ``a2 u'' + a1 u' + a0 u`` is compared
        with the sum of absolute values of its contributions.
        """
        a2, a1, a0 = self.equation
        c = np.asarray(self.coefficients)
        K = len(c)
        worst = 0.0
        for n in range(K - 1):
            terms = []
            for j, aj in enumerate(a2):
                k = n + 1 - j
                if 0 <= k < K:
                    terms.append(aj * (k + 1) * k * c[k + 1] if k + 1 < K else 0.0)
            for j, aj in enumerate(a1):
                k = n - j
                if 0 <= k < K - 1:
                    terms.append(aj * (k + 1) * c[k + 1])
            for j, aj in enumerate(a0):
                k = n - j
                if 0 <= k < K:
                    terms.append(aj * c[k])
            scale = sum(abs(x) for x in terms)
            if scale > 0:
                worst = max(worst, abs(sum(terms)) / scale)
        return worst


def _lam(params, E):
    return E / params.h ** 2


def frobenius_regular_seed(profile, params, E, order=12):
    """Regular solution at z1 normalized to ``u(z1) = 1``.

    Depends on E and h only; the coupling enters at the other pole.
    """
    if not E > 0:
        raise DomainError("energy must be positive")
    if order < 4:
        raise DomainError("series order must be at least 4")
    ode = RadialODE(profile)
    a2, a1, a0 = ode.local(profile.z1, -1.0, _lam(params, E), pole=True)
    c = kernels.series_coefficients(a2, a1, a0, 0.0, 1.0, 0.0, int(order) + 1)
    if not np.all(np.isfinite(c)):
        raise NumericalError("Frobenius recurrence overflowed; use a smaller start offset")
    r = ode.radius_excluding(profile.z1)
    ratios = np.abs(c[-4:]) * r ** np.arange(len(c) - 4, len(c))
    if np.all(np.diff(ratios) > 0) and ratios[-1] > 1e8 * max(abs(c[0]), 1.0):
        raise NumericalError("Frobenius recurrence blows up inside the estimated radius; "
                             "use a smaller start offset")
    return FrobeniusSeed(profile.z1, c, int(order), 0.0, (a2, a1, a0))


@dataclass
class ShootingTrace:
    """State at requested stations and a count of Taylor steps taken."""

    z: list = field(default_factory=list)
    u: list = field(default_factory=list)
    du: list = field(default_factory=list)
    steps: int = 0


class _Integrator:
    """Taylor-series stepping of the radial ODE on the open interval."""

    safety = 0.5
    osc = 2.5
    max_terms = 400

    def __init__(self, ode, lam, tol):
        self.ode = ode
        self.lam = lam
        self.tol = tol

    def _series(self, a2, a1, a0, rho, c0, c1, t):
        """``(u, du/dt)`` at t of the local series, computed in ``tau = t / T``, T = t.

        Rescaling keeps the coefficients O(1) however close the nearest
        singularity is.
        """
        T = t
        a2 = a2 * T ** np.arange(len(a2))
        a1 = a1 * T ** np.arange(1, len(a1) + 1)
        a0 = a0 * T ** np.arange(2, len(a0) + 2)
        n = 32
        while True:
            c = kernels.series_coefficients(a2, a1, a0, rho, c0, c1 * T, n)
            u, du, tail = kernels.series_eval(c, rho, 1.0)
            if tail < self.tol * 1e-3 or n >= self.max_terms:
                if not (math.isfinite(u) and math.isfinite(du)) or tail > self.tol:
                    raise NumericalError("Taylor step failed to converge", achieved=tail)
                scale = T ** rho if rho else 1.0
                return u * scale, du * scale / T
            n *= 2

    def step(self, z, u, du, target):
        sign = 1.0 if target > z else -1.0
        dist = abs(target - z)
        r = self.ode.radius(z)
        kz = self.ode.wavenumber(z, self.lam)
        t = min(dist, self.safety * r, self.osc / kz if kz > 0 else math.inf)
        a2, a1, a0 = self.ode.local(z, sign, self.lam)
        un, dun = self._series(a2, a1, a0, 0.0, u, sign * du, t)
        return z + sign * t if t < dist else target, un, sign * dun

    def run(self, z, u, du, stations, trace):
        for target in stations:
            while z != target:
                z, u, du = self.step(z, u, du, target)
                trace.steps += 1
                # keep magnitudes bounded; only ratios matter
                s = max(abs(u), abs(du) * abs(target - z) + 1e-300, 1e-300)
                if s > 1e100:
                    u, du = u / s, du / s
                    trace.u = [v / s for v in trace.u]
                    trace.du = [v / s for v in trace.du]
            trace.z.append(z)
            trace.u.append(u)
            trace.du.append(du)
        return z, u, du


def _pole_offset(ode, lam, pole, slope):
    """Start/stop offset in z from a pole: inside the Frobenius disc and the first oscillation."""
    r = ode.radius_excluding(pole)
    k2a2 = 2.0 * lam * slope * slope
    return min(0.25 * r, 4.0 / k2a2 if k2a2 > 0 else math.inf)


def trace_to_pole(profile, params, E, offsets, tol=1e-13):
    """Integrate the regular solution from z1 down to ``z0 + offsets``.

    Returns a ShootingTrace whose stations are in the order of decreasing
    offset.
    """
    ode = RadialODE(profile)
    lam = _lam(params, E)
    t1 = _pole_offset(ode, lam, profile.z1, profile.far_pole_slope)
    integ = _Integrator(ode, lam, tol)
    a2, a1, a0 = ode.local(profile.z1, -1.0, lam, pole=True)
    u, dudt = integ._series(a2, a1, a0, 0.0, 1.0, 0.0, t1)
    trace = ShootingTrace()
    stations = sorted((profile.z0 + float(o) for o in offsets), reverse=True)
    if stations[0] >= profile.z1 - t1:
        raise DomainError("stations must lie below the start of the integration")
    integ.run(profile.z1 - t1, u, -dudt, stations, trace)
    return trace


@dataclass(frozen=True)
class ShootResult:
    boundary: BoundaryData
    trace: ShootingTrace
    method: str


def shoot(profile, params, E, method="frobenius", tol=1e-13, fit_offsets=None, extra_powers=7):
    """Boundary data (a, b) at z0 of the solution regular at z1.

    ``"frobenius"`` projects onto the two Frobenius solutions at z0, which
    gives a and b exactly (up to the step tolerance).  ``"fit"`` samples the
    solution near z0 and fits ``-(a / 4 pi)/d + b + sum c_j d^j``.
    """
    if not E > 0:
        raise DomainError("energy must be positive")
    ode = RadialODE(profile)
    lam = _lam(params, E)
    a0s = profile.pole_slope
    if method == "frobenius":
        t0 = _pole_offset(ode, lam, profile.z0, a0s)
        trace = trace_to_pole(profile, params, E, [t0], tol)
        u, du = trace.u[-1], trace.du[-1]
        integ = _Integrator(ode, lam, tol)
        a2, a1, a0 = ode.local(profile.z0, 1.0, lam, pole=True)
        r1, r1p = integ._series(a2, a1, a0, 0.0, 1.0, 0.0, t0)
        r2, r2p = integ._series(a2, a1, a0, -0.5, 1.0, 0.0, t0)
        det = r2 * r1p - r1 * r2p
        A = (u * r1p - r1 * du) / det
        B = (r2 * du - u * r2p) / det
        bd = BoundaryData(-4.0 * math.pi * a0s * A, B, 0.0)
        return ShootResult(bd, trace, method)
    if method == "fit":
        k = math.sqrt(2.0 * E) / params.h
        if fit_offsets is None:
            # inside the first wavelength but clear of the pole, where the
            # singular part swamps b and amplifies integration noise
            d = np.geomspace(1e-2, 0.3, 16) / k
            fit_offsets = (d / a0s) ** 2
        trace = trace_to_pole(profile, params, E, fit_offsets, tol)
        samples = np.column_stack([trace.z, trace.u])
        bd = extract_boundary_data(samples, profile, extra_powers=extra_powers)
        return ShootResult(bd, trace, method)
    raise ValueError(f"unknown method {method!r}")


def normalized_mismatch(params, E, boundary):
    """Normalized mismatch of the point-interaction condition ``a = (2 alpha / h^2) b``.

    With ``k = sqrt(2E)/h`` the vectors ``(a, (4 pi / k) b)`` and
    ``(1, -gamma k / 4 pi)`` (``gamma = 2 alpha / h^2``) are compared, so the
    value is the cosine of the angle between them and stays informative at
    alpha = 0.
    """
    k = math.sqrt(2.0 * E) / params.h
    gamma = 2.0 * params.alpha / params.h ** 2
    x2 = (4.0 * math.pi / k) * boundary.b
    y2 = gamma * k / (4.0 * math.pi)
    num = boundary.a - gamma * boundary.b
    return min(1.0, max(-1.0, num / (math.hypot(boundary.a, x2) * math.hypot(1.0, y2))))


def mismatch(profile, params, E, method="frobenius", tol=1e-13):
    """Normalized extension-condition mismatch F(E) of the shooting solution."""
    return normalized_mismatch(params, E, shoot(profile, params, E, method=method, tol=tol).boundary)


@dataclass(frozen=True)
class OracleEigenvalue:
    E: float
    bracket: tuple
    mismatch_slope: float


def _map(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def scan_grid(profile, params, refine=1):
    """Energy grid with spacing ``pi h sqrt(2E) / (4 L refine)``."""
    E_min, E_max = params.E_window
    L = meridian_length(profile)
    grid = [E_min]
    E = E_min
    while E < E_max:
        E = E + math.pi * params.h * math.sqrt(2.0 * E) / (4.0 * L * refine)
        grid.append(min(E, E_max))
    return np.array(grid)


def oracle_spectrum(profile, params, method="frobenius", refine=1, threads=None, tol=1e-13):
    """All eigenvalues in the open energy window, by scan and bracketed root finding."""
    if not isinstance(params, SpectralParams):
        raise TypeError("params must be SpectralParams")

    def F(E):
        try:
            return mismatch(profile, params, E, method=method, tol=tol)
        except NumericalError as exc:
            raise NumericalError(f"oracle shooting failed at E={E!r}: {exc}",
                                 achieved=exc.achieved) from exc

    grid = scan_grid(profile, params, refine)
    vals = _map(F, grid, threads)
    brackets = [(grid[i], grid[i + 1]) for i in range(len(grid) - 1)
                if vals[i] * vals[i + 1] < 0.0 or vals[i + 1] == 0.0]

    def solve(br):
        lo, hi = br
        if F(hi) == 0.0:
            return OracleEigenvalue(hi, (hi, hi), math.nan)
        r = brentq(F, lo, hi, xtol=1e-12 * lo, rtol=1e-15, maxiter=200)
        w = 2e-11 * r
        blo, bhi = max(lo, r - w), min(hi, r + w)
        flo, fhi = F(blo), F(bhi)
        if flo * fhi > 0:
            blo, bhi = lo, hi
            flo, fhi = F(lo), F(hi)
        slope = (fhi - flo) / (bhi - blo) if bhi > blo else math.nan
        return OracleEigenvalue(float(r), (float(blo), float(bhi)), float(slope))

    roots = _map(solve, brackets, threads)
    lo, hi = params.E_window
    return [r for r in roots if lo < r.E < hi]


def sphere_exact_spectrum(params):
    """Exact eigenvalues on the unit sphere from ``tan(pi kappa) = alpha kappa / (2 pi h^2)``.

    The regular solution is ``sin(kappa (pi - s)) / sin s`` with
    ``E = h^2 (kappa^2 - 1) / 2``; roots are found branch by branch in the
    monotone phase form ``pi kappa - atan(alpha kappa / (2 pi h^2)) = j pi``.
    """
    h, alpha = params.h, params.alpha
    c = alpha / (2.0 * math.pi * h * h)
    lo, hi = params.E_window
    k_lo = math.sqrt(2.0 * lo / h ** 2 + 1.0)
    k_hi = math.sqrt(2.0 * hi / h ** 2 + 1.0)

    def psi(kappa):
        return math.pi * kappa - math.atan(c * kappa)

    out = []
    j_lo = math.floor(psi(k_lo) / math.pi)
    j_hi = math.ceil(psi(k_hi) / math.pi)
    for j in range(max(j_lo, 0), j_hi + 1):
        if c == 0.0:
            kappa = float(j)
        else:
            a, b = (j, j + 0.5) if c > 0 else (j - 0.5, j)
            g = lambda x: psi(x) - j * math.pi  # noqa: E731
            if a <= 0 or g(a) * g(b) > 0:
                continue
            kappa = brentq(g, a, b, xtol=1e-15, rtol=1e-15)
        E = 0.5 * h * h * (kappa * kappa - 1.0)
        if lo < E < hi:
            out.append(E)
    return out
