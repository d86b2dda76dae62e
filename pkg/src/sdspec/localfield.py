"""Matched asymptotic eigenfunction: near-pole solution, outer WKB, gluing.

Near the pole carrying the point interaction the radial function is built in
the geodesic distance ``d`` from that pole, with ``x = sqrt(2E) d / h``
(``x = 2 sqrt(tau)`` for the Langer variable ``tau = S/h^2``):

* derived mode: ``j0(x) + A1 * y0(x)``, the exact flat s-wave pair;
* paper mode:   ``A1 tau^-1/2 Y1(2 sqrt tau) + tau^-1/2 J1(2 sqrt tau)``.

Away from that pole the solution regular at the far pole is the leading WKB
wave ``chi(z) cos(k d(z) - k L - pi/2)`` with ``k = sqrt(2E)/h``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalError, ResolutionError
from .quantize import QuantizationMode, as_mode
from .specfun import bessel_j1, bessel_y1, spherical_j0, spherical_y0
from .surface import eval_profile, geodesic_distance_from_pole, meridian_length


def _wavenumber(params, E):
    if not E > 0:
        raise DomainError("energy must be positive")
    return math.sqrt(2.0 * E) / params.h


def _radial_drift(profile, z):
    """``2 f'/f - f' f'' / (f'^2 + 1)``, the first-order coefficient of the radial ODE."""
    f, fp, fpp = eval_profile(profile, z)
    return 2.0 * fp / f - fp * fpp / (fp * fp + 1.0)


# --------------------------------------------------------------------------
# Langer frame


def hamilton_jacobi_S(profile, E, z):
    """``S(z) = (1/2 int_{z0}^{z} sqrt(2E(f'^2+1)) dz)^2 = E d^2 / 2``."""
    if not E > 0:
        raise DomainError("energy must be positive")
    d = geodesic_distance_from_pole(profile, z, "left")
    return 0.5 * E * np.asarray(d) ** 2 if np.ndim(d) else 0.5 * E * d * d


def hamilton_jacobi_S_prime(profile, E, z):
    d = geodesic_distance_from_pole(profile, z, "left")
    fp = eval_profile(profile, z)[1]
    return E * d * np.sqrt(fp * fp + 1.0)


@dataclass(frozen=True)
class LangerFrame:
    """Langer variable and the coefficient functions of the reference equation."""

    profile: object
    E: float
    h: float

    def S(self, z):
        return hamilton_jacobi_S(self.profile, self.E, z)

    def S_prime(self, z):
        return hamilton_jacobi_S_prime(self.profile, self.E, z)

    def tau(self, z):
        return self.S(z) / self.h ** 2

    def n_at(self, z):
        return self.S(z) / self.S_prime(z) * _radial_drift(self.profile, z)

    def k_at(self, z):
        fp = eval_profile(self.profile, z)[1]
        return 2.0 * self.E * self.S(z) / self.S_prime(z) ** 2 * (fp * fp + 1.0)

    def p_coefficient(self, z):
        return (np.asarray(z) - self.profile.z0) * _radial_drift(self.profile, z)

    def q_coefficient(self, z):
        fp = eval_profile(self.profile, z)[1]
        return (np.asarray(z) - self.profile.z0) * (fp * fp + 1.0)


def langer_n(profile, E, z):
    """``n(z) = (S/S') (2 f'/f - f' f''/(f'^2+1))`` at interior z."""
    return LangerFrame(profile, E, 1.0).n_at(z)


@dataclass(frozen=True)
class PoleLimit:
    value: float
    offsets: tuple
    samples: tuple


def langer_n_pole_limit(profile, E, offsets=(1e-2, 1e-3, 1e-4)):
    """Richardson extrapolation of n(z) to the pole from samples at ``z0 + offsets``.

    n is analytic in z - z0, so each level removes one more power.
    """
    t = np.array(offsets, dtype=float)
    vals = np.array([langer_n(profile, E, profile.z0 + ti) for ti in t])
    table = list(vals)
    for level in range(1, len(vals)):
        nxt = []
        for i in range(len(table) - 1):
            r = (t[i] / t[i + 1]) ** level
            nxt.append((r * table[i + 1] - table[i]) / (r - 1.0))
        table = nxt
    return PoleLimit(float(table[0]), tuple(t), tuple(float(v) for v in vals))


# --------------------------------------------------------------------------
# near-pole solution


@dataclass(frozen=True)
class NearPoleSolution:
    """``A1`` multiplies the singular function, ``A2`` the regular one."""

    A1: float
    A2: float
    mode: QuantizationMode

    @property
    def sin_cos_ratio(self):
        """B/A for ``(A sin x + B cos x)/x``; derived mode only."""
        if self.mode is not QuantizationMode.DERIVED:
            raise ValueError("sin/cos form only describes the derived near-pole solution")
        return -self.A1 / self.A2


def near_pole_solution(params, E, mode):
    mode = as_mode(mode)
    root = math.sqrt(2.0 * E)
    if mode is QuantizationMode.PAPER:
        return NearPoleSolution(-root * params.alpha / (2.0 * params.h ** 3), 1.0, mode)
    return NearPoleSolution(params.alpha * root / (2.0 * math.pi * params.h ** 3), 1.0, mode)


def _near_from_distance(params, E, d, mode):
    sol = near_pole_solution(params, E, mode)
    x = _wavenumber(params, E) * np.asarray(d, dtype=float)
    if sol.mode is QuantizationMode.PAPER:
        tau_root = 0.5 * x  # sqrt(tau)
        regular = bessel_j1(x) / tau_root
        if sol.A1 == 0.0:
            return regular
        return sol.A1 * bessel_y1(x) / tau_root + regular
    if sol.A1 == 0.0:
        return spherical_j0(x)
    return sol.A2 * spherical_j0(x) + sol.A1 * spherical_y0(x)


def near_pole_value(profile, params, E, z, mode):
    """Near-pole branch of the eigenfunction at z (not beyond mid-meridian)."""
    d = geodesic_distance_from_pole(profile, z, "left")
    if np.any(np.asarray(d) > 0.5 * meridian_length(profile)):
        raise DomainError("near-pole solution requested beyond the middle of the meridian")
    if np.any(np.asarray(d) <= 0.0):
        raise DomainError("near-pole solution is singular at the pole itself")
    out = _near_from_distance(params, E, d, mode)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class BoundaryData:
    """Coefficients of ``psi = -(a / 4 pi) / d + b + o(1)`` at the pole."""

    a: float
    b: float
    residual: float = 0.0


def extract_boundary_data(samples, profile, extra_powers=0):
    """Least-squares fit of samples (z, value) to ``{1/d, 1, d, ..., d**extra}``.

    With ``extra_powers=0`` this is the bare two-term expansion; the higher
    powers absorb the smooth o(1) remainder when samples are not deep in the
    asymptotic regime.  ``residual`` is the RMS misfit relative to the RMS of
    the values.
    """
    arr = np.asarray(samples, dtype=float)
    z, v = arr[:, 0], arr[:, 1]
    d = np.asarray(geodesic_distance_from_pole(profile, z, "left"), dtype=float)
    nbasis = 2 + int(extra_powers)
    if len(np.unique(d)) < nbasis or np.any(d <= 0):
        raise NumericalError("boundary-data fit is ill-conditioned: need distinct d > 0 samples")
    cols = [1.0 / d] + [d ** p for p in range(0, nbasis - 1)]
    A = np.column_stack(cols)
    norms = np.linalg.norm(A, axis=0)
    coef, _, rank, sv = np.linalg.lstsq(A / norms, v, rcond=None)
    if rank < nbasis or sv[-1] < 1e-14 * sv[0]:
        raise NumericalError("boundary-data fit is ill-conditioned", achieved=float(sv[-1] / sv[0]))
    coef = coef / norms
    fit = A @ coef
    scale = math.sqrt(float(np.mean(v * v))) or 1.0
    resid = math.sqrt(float(np.mean((fit - v) ** 2))) / scale
    return BoundaryData(-4.0 * math.pi * float(coef[0]), float(coef[1]), resid)


# --------------------------------------------------------------------------
# outer WKB solution


@dataclass(frozen=True)
class OuterSolution:
    """Leading WKB wave regular at the far pole.

    ``nu1``/``nu2`` are the (complex) weights of ``chi exp(+i phase)`` and
    ``chi exp(-i phase)``.
    """

    amplitude_mode: QuantizationMode
    chi: object
    phase: object
    nu1: complex
    nu2: complex
    phase_offset: float


def outer_solution(profile, params, E, amplitude_mode):
    mode = as_mode(amplitude_mode)
    k = _wavenumber(params, E)
    L = meridian_length(profile)
    offset = -k * L - 0.5 * math.pi

    def phase(z):
        return k * geodesic_distance_from_pole(profile, z, "left")

    if mode is QuantizationMode.DERIVED:
        scale = (2.0 * E) ** -0.25

        def chi(z):
            f = eval_profile(profile, z)[0]
            return scale / f
    else:
        def chi(z):
            f, fp, _ = eval_profile(profile, z)
            return np.sqrt(fp * fp + 1.0) / np.sqrt(f)

    return OuterSolution(mode, chi, phase, 0.5 * complex(math.cos(offset), math.sin(offset)),
                         0.5 * complex(math.cos(offset), -math.sin(offset)), offset)


def outer_wkb_value(profile, params, E, z, amplitude_mode, pole_exclusion=None):
    L = meridian_length(profile)
    excl = 1e-4 * L if pole_exclusion is None else pole_exclusion
    dl = np.asarray(geodesic_distance_from_pole(profile, z, "left"))
    if np.any(dl < excl) or np.any(L - dl < excl):
        raise DomainError("outer WKB solution is not evaluated inside the pole neighbourhoods")
    sol = outer_solution(profile, params, E, amplitude_mode)
    out = sol.chi(z) * np.cos(sol.phase(z) + sol.phase_offset)
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# gluing


@dataclass
class GluedEigenfunction:
    z: np.ndarray
    s: np.ndarray
    values: np.ndarray
    cut_inner: float
    cut_outer: float
    matching_residual: float
    overlap_scale: float
    branch: np.ndarray = field(repr=False)
    E: float = math.nan
    h: float = math.nan
    mode: str = "derived"
    scale_factor: float = 1.0
    warning: bool = False

    @property
    def relative_residual(self):
        """Matching residual divided by max |psi_1| over the overlap."""
        return self.matching_residual / self.overlap_scale if self.overlap_scale else math.inf


def _taper(s, s_in, s_out):
    x = np.clip((s - s_in) / (s_out - s_in), 0.0, 1.0)
    return 0.5 * (1.0 + np.cos(math.pi * x))


def overlap_window(profile, params, E, overlap=(0.5, 1.0)):
    """Arc-length interval ``[d_in, d_out]`` where the two branches are blended.

    The window is measured in local wavelengths ``2 pi h / sqrt(2E)`` and is
    shrunk, keeping its proportions, so it ends before mid-meridian.
    """
    lam = 2.0 * math.pi / _wavenumber(params, E)
    d_in, d_out = overlap[0] * lam, overlap[1] * lam
    half = 0.5 * meridian_length(profile)
    if d_out > half:
        d_in, d_out = d_in * half / d_out, half
    return d_in, d_out


def glue(profile, params, E, mode, overlap=(0.5, 1.0), points_per_wavelength=60,
         min_points=801, warn_above=0.25):
    """Blend the near-pole and outer branches with a cosine partition of unity.

    The outer branch is rescaled by the least-squares constant over the
    overlap; ``matching_residual`` is the sup-norm mismatch there.
    """
    mode = as_mode(mode)
    L = meridian_length(profile)
    d_in, d_out = overlap_window(profile, params, E, overlap)
    cap = 0.5 * d_in
    lam = 2.0 * math.pi / _wavenumber(params, E)
    n = max(min_points, int(points_per_wavelength * L / lam) + 1)
    s = np.linspace(cap, L - cap, n)
    z = np.asarray(profile.meridian.z_of_s(s))
    inner = s <= d_out
    outer = s >= d_in
    psi1 = np.zeros(n)
    psi2 = np.zeros(n)
    psi1[inner] = _near_from_distance(params, E, s[inner], mode)
    sol = outer_solution(profile, params, E, mode)
    psi2[outer] = sol.chi(z[outer]) * np.cos(sol.phase(z[outer]) + sol.phase_offset)
    both = inner & outer
    c = float(np.dot(psi1[both], psi2[both]) / np.dot(psi2[both], psi2[both]))
    psi2 *= c
    mismatch = float(np.max(np.abs(psi1[both] - psi2[both])))
    scale = float(np.max(np.abs(psi1[both])))
    e1 = _taper(s, d_in, d_out)
    values = e1 * psi1 + (1.0 - e1) * psi2
    branch = np.where(~outer, "near", np.where(~inner, "outer", "overlap"))
    zin, zout = profile.meridian.z_of_s(np.array([d_in, d_out]))
    out = GluedEigenfunction(z, s, values, float(zin), float(zout), mismatch, scale, branch,
                             float(E), params.h, mode.value, c)
    out.warning = out.relative_residual > warn_above
    return out


def eigenfunction_from_samples(profile, E, h, s, values):
    """Wrap arbitrary samples on a uniform arc-length grid for ``radial_residual``."""
    s = np.asarray(s, dtype=float)
    z = np.asarray(profile.meridian.z_of_s(s))
    return GluedEigenfunction(z, s, np.asarray(values, dtype=float), float(z[0]), float(z[0]),
                              0.0, 1.0, np.full(len(s), "sample"), float(E), float(h))


_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def radial_residual(profile, params, E, eigfn, min_points_per_wavelength=10):
    """Relative L2 residual ``||(H - E) u|| / ||u||`` of the radial equation.

    The m = 0 radial operator is applied in arc length s, where it reads
    ``-(h^2/2)(u'' + 2 (f_s / f) u')``; derivatives use fourth-order central
    differences and the norm carries the volume weight ``f^2 ds``.
    """
    s = np.asarray(eigfn.s, dtype=float)
    u = np.asarray(eigfn.values, dtype=float)
    ds = np.diff(s)
    if len(s) < 9 or np.max(np.abs(ds - ds[0])) > 1e-9 * ds[0]:
        raise ResolutionError("radial_residual needs a uniform arc-length grid of >= 9 points")
    step = ds[0]
    lam = 2.0 * math.pi / _wavenumber(params, E)
    if lam / step < min_points_per_wavelength:
        raise ResolutionError(
            f"grid has {lam / step:.1f} points per wavelength, need {min_points_per_wavelength}")
    du = np.convolve(u, _D1[::-1], mode="valid") / step
    d2u = np.convolve(u, _D2[::-1], mode="valid") / step ** 2
    zi = np.asarray(eigfn.z)[2:-2]
    f, fp, _ = eval_profile(profile, zi)
    fs = fp / np.sqrt(fp * fp + 1.0)
    ui = u[2:-2]
    r = -0.5 * params.h ** 2 * (d2u + 2.0 * fs / f * du) - E * ui
    w = f * f
    return math.sqrt(float(np.sum(w * r * r)) / float(np.sum(w * ui * ui)))
