"""Quantization condition for the s-wave spectral series and its limits.

The condition is handled in phase form: with ``Phi(E) = J(E)/h`` and a
coupling-dependent right-hand side ``num/den``,

    Psi(E) = Phi(E) - atan2(num, den) = k * pi,

which is continuous in E (no tangent poles).  Two right-hand sides ship:

* ``paper``:   tan Phi = 2 h^3 / (sqrt(2E) alpha)
* ``derived``: tan Phi = alpha sqrt(2E) / (2 pi h^3)

The derived form comes from matching the flat s-wave solution
``(A sin kr + B cos kr)/r`` against the point-interaction boundary condition.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .action import action_energy_derivative, half_action
from .errors import DegenerateConditionError, DomainError
from .surface import meridian_length


class QuantizationMode(str, enum.Enum):
    PAPER = "paper"
    DERIVED = "derived"


def as_mode(mode):
    return mode if isinstance(mode, QuantizationMode) else QuantizationMode(str(mode))


@dataclass(frozen=True)
class SpectralParams:
    h: float
    alpha: float
    m: int = 0
    E_window: tuple = (1e-3, 1.0)

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("h must be positive")
        if self.m != 0:
            raise ValueError("only the m = 0 sector couples to the point interaction")
        lo, hi = self.E_window
        if not 0 < lo < hi:
            raise ValueError("E_window must satisfy 0 < E_min < E_max")
        object.__setattr__(self, "E_window", (float(lo), float(hi)))

    @classmethod
    def from_ratio(cls, h, alpha_over_h3, E_window=(1e-3, 1.0)):
        return cls(h, alpha_over_h3 * h ** 3, 0, E_window)

    @property
    def ratio(self):
        return self.alpha / self.h ** 3

    @property
    def coupling(self):
        """``2 alpha / h^2``: the boundary condition reads ``a = coupling * b``."""
        return 2.0 * self.alpha / self.h ** 2


def rhs_pair(params, E, mode):
    """``(num, den)`` with the condition ``tan Phi = num / den``."""
    mode = as_mode(mode)
    root = math.sqrt(2.0 * E)
    h3 = params.h ** 3
    if mode is QuantizationMode.PAPER:
        if params.alpha == 0.0:
            raise DegenerateConditionError(
                "paper-mode right-hand side is singular at alpha = 0; use limit_condition")
        return 2.0 * h3, root * params.alpha
    return params.alpha * root, 2.0 * math.pi * h3


def _rhs_pair_derivative(params, E, mode):
    root = math.sqrt(2.0 * E)
    if as_mode(mode) is QuantizationMode.PAPER:
        return 0.0, params.alpha / root
    return params.alpha / root, 0.0


def condition_phase(profile, params, E, mode):
    """Pole-free residual ``Psi(E) = J(E)/h - atan2(num, den)``."""
    if not E > 0:
        raise DomainError("condition_phase needs E > 0")
    num, den = rhs_pair(params, E, mode)
    return half_action(profile, E).J / params.h - math.atan2(num, den)


def condition_phase_derivative(profile, params, E, mode):
    num, den = rhs_pair(params, E, mode)
    dnum, dden = _rhs_pair_derivative(params, E, mode)
    datan = (den * dnum - num * dden) / (num * num + den * den)
    return action_energy_derivative(profile, E) / params.h - datan


def _atan_range(params, mode):
    """Interval containing atan2(num, den) for every E > 0."""
    if as_mode(mode) is QuantizationMode.PAPER:
        return (0.0, math.pi / 2) if params.alpha > 0 else (math.pi / 2, math.pi)
    if params.alpha > 0:
        return (0.0, math.pi / 2)
    if params.alpha < 0:
        return (-math.pi / 2, 0.0)
    return (0.0, 0.0)


def _energy_at_phase(profile, h, phi):
    """Invert ``Phi(E) = sqrt(2E) L / h``."""
    root = max(phi, 0.0) * h / meridian_length(profile)
    return 0.5 * root * root


def solve_branch(profile, params, k, mode, tol=1e-13):
    """Root of ``Psi(E) = k pi`` inside the energy window, or None.

    Returns ``(E_k, residual)``.  The bracket comes from inverting Phi over the
    range of the atan2 term; inside it a Newton iteration is safeguarded by
    bisection.
    """
    mode = as_mode(mode)
    E_min, E_max = params.E_window
    if mode is QuantizationMode.PAPER and params.alpha == 0.0:
        E = limit_condition(profile, params, k, "weak", mode)
        if E_min <= E <= E_max:
            return E, 0.0
        return None
    lo_a, hi_a = _atan_range(params, mode)
    target = k * math.pi
    lo = max(E_min, _energy_at_phase(profile, params.h, target + lo_a))
    hi = min(E_max, _energy_at_phase(profile, params.h, target + hi_a))
    if lo_a == hi_a:
        E = _energy_at_phase(profile, params.h, target + lo_a)
        if E_min <= E <= E_max and E > 0:
            return E, condition_phase(profile, params, E, mode) - target
        return None
    lo = max(lo, 1e-300)
    if not lo <= hi:
        return None

    def g(E):
        return condition_phase(profile, params, E, mode) - target

    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo, 0.0
    if ghi == 0.0:
        return hi, 0.0
    if glo * ghi > 0:
        return None
    if glo > 0:  # orient so that g(lo) < 0
        lo, hi = hi, lo
    E = 0.5 * (lo + hi)
    for _ in range(200):
        val = g(E)
        if val < 0:
            lo = E
        else:
            hi = E
        dval = condition_phase_derivative(profile, params, E, mode)
        step = val / dval if dval != 0 else math.inf
        cand = E - step
        if not (min(lo, hi) < cand < max(lo, hi)):
            cand = 0.5 * (lo + hi)
        if abs(cand - E) <= tol * E:
            E = cand
            break
        E = cand
    return E, g(E)


@dataclass(frozen=True)
class SpectralEntry:
    k: int
    E: float
    phase_at_root: float
    mode: QuantizationMode
    residual: float


@dataclass
class SpectralSeries:
    entries: list = field(default_factory=list)

    @property
    def energies(self):
        return [e.E for e in self.entries]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def enumerate_spectrum(profile, params, mode):
    """All roots of the condition inside the energy window, increasing in E."""
    mode = as_mode(mode)
    E_min, E_max = params.E_window
    L = meridian_length(profile)
    phi_lo = math.sqrt(2.0 * E_min) * L / params.h
    phi_hi = math.sqrt(2.0 * E_max) * L / params.h
    k_first = math.floor(phi_lo / math.pi) - 2
    k_last = math.ceil(phi_hi / math.pi) + 2
    entries = []
    for k in range(max(k_first, -1), k_last + 1):
        res = solve_branch(profile, params, k, mode)
        if res is None:
            continue
        E, resid = res
        phase = half_action(profile, E).J / params.h
        entries.append(SpectralEntry(k, E, phase, mode, resid))
    entries.sort(key=lambda e: e.E)
    return SpectralSeries(entries)


_OFFSETS = {
    (QuantizationMode.PAPER, "weak"): 0.5,
    (QuantizationMode.PAPER, "strong"): 0.0,
    (QuantizationMode.DERIVED, "weak"): 0.0,
    (QuantizationMode.DERIVED, "strong"): 0.5,
}


def limit_offset(limit, mode):
    """Bohr-Sommerfeld offset nu in ``Phi = (k + nu) pi`` for a coupling limit."""
    if limit not in ("weak", "strong"):
        raise ValueError("limit must be 'weak' or 'strong'")
    return _OFFSETS[(as_mode(mode), limit)]


def limit_condition(profile, params, k, limit, mode):
    """Energy of branch k in the weak or strong coupling limit."""
    return _energy_at_phase(profile, params.h, (k + limit_offset(limit, mode)) * math.pi)


@dataclass(frozen=True)
class CouplingRegime:
    tag: str
    ratio: float
    epsilon: float
    C: float
    lower: float
    upper: float
    offsets: dict | None  # mode -> Bohr-Sommerfeld offset; None inside the window

    def maslov_index(self, mode):
        """Effective index mu with ``Phi/pi + mu/4`` integer, or None in the window."""
        if self.offsets is None:
            return None
        return int(round(4 * self.offsets[as_mode(mode).value])) % 4


def classify_regime(params, C=1.0, epsilon=0.1):
    """Weak / window / strong coupling by the size of ``alpha / h^3``.

    The window is the open interval between ``C h^eps`` and ``C h^-eps``
    (ordered so that it is non-empty for h < 1).
    """
    if not params.h > 0:
        raise DomainError("h must be positive")
    ratio = params.ratio
    a, b = C * params.h ** epsilon, C * params.h ** (-epsilon)
    lower, upper = min(a, b), max(a, b)
    size = abs(ratio)
    if size <= lower:
        tag = "weak"
    elif size >= upper:
        tag = "strong"
    else:
        tag = "window"
    offsets = None
    if tag != "window":
        offsets = {m.value: limit_offset(tag, m) for m in QuantizationMode}
    return CouplingRegime(tag, ratio, epsilon, C, lower, upper, offsets)
