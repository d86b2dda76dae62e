"""Bessel functions of orders 0 and 1 and the spherical s-wave pair.

Ascending power series below ``X_SWITCH`` and the Hankel large-argument
expansion (summed to its smallest term) above; see ``_kernels_py``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._kernels_py import X_SWITCH
from .errors import DomainError

__all__ = [
    "X_SWITCH",
    "AsymptoticForm",
    "bessel_j0",
    "bessel_j1",
    "bessel_y0",
    "bessel_y1",
    "bessel_j1_prime",
    "bessel_y1_prime",
    "spherical_j0",
    "spherical_y0",
    "large_argument_form",
]


def _eval(x, index, strict_positive):
    xa = np.asarray(x, dtype=float)
    if strict_positive:
        if np.any(~(xa > 0.0)):
            raise DomainError("argument must be > 0")
    elif np.any(~(xa >= 0.0)):
        raise DomainError("argument must be >= 0")
    if xa.ndim == 0:
        return kernels.bessel01(float(xa))[index]
    return kernels.bessel01_array(xa)[index]


def bessel_j0(x):
    return _eval(x, 0, False)


def bessel_j1(x):
    return _eval(x, 1, False)


def bessel_y0(x):
    return _eval(x, 2, True)


def bessel_y1(x):
    return _eval(x, 3, True)


def bessel_j1_prime(x):
    """J1'(x) = J0(x) - J1(x)/x."""
    return bessel_j0(x) - bessel_j1(x) / np.asarray(x, dtype=float)


def bessel_y1_prime(x):
    return bessel_y0(x) - bessel_y1(x) / np.asarray(x, dtype=float)


def spherical_j0(x):
    """sin(x)/x, with its series below |x| = 1e-4."""
    xa = np.asarray(x, dtype=float)
    small = np.abs(xa) < 1e-4
    safe = np.where(small, 1.0, xa)
    x2 = xa * xa
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    return float(out) if out.ndim == 0 else out


def spherical_y0(x):
    xa = np.asarray(x, dtype=float)
    if np.any(xa == 0.0):
        raise DomainError("spherical_y0 is singular at x = 0")
    out = -np.cos(xa) / xa
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class AsymptoticForm:
    """``amplitude * cos(phase)`` / ``amplitude * sin(phase)`` leading terms."""

    amplitude: float
    phase: float
    order: float

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")

    @property
    def cos_form(self):
        return self.amplitude * math.cos(self.phase)

    @property
    def sin_form(self):
        return self.amplitude * math.sin(self.phase)


def asymptotic_form(order, x):
    if not x > 0:
        raise DomainError("large-argument form needs x > 0")
    return AsymptoticForm(math.sqrt(2.0 / (math.pi * x)),
                          x - order * math.pi / 2 - math.pi / 4, float(order))


def large_argument_form(order, x):
    """Leading large-x forms of the Bessel (cos) and Neumann (sin) functions."""
    form = asymptotic_form(order, x)
    return form.cos_form, form.sin_form
