"""Meridian action integrals and the closed geodesic through both poles."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, NumericalError
from .surface import eval_profile, geodesic_distance_from_pole, meridian_length


@dataclass(frozen=True)
class ActionValue:
    J: float
    E: float
    quadrature_error_estimate: float


def half_action(profile, E):
    """``J(E) = int_{z0}^{z1} sqrt(2E (f'^2 + 1)) dz``, half the cycle action."""
    if not E > 0:
        raise DomainError("half_action needs E > 0")
    root = math.sqrt(2.0 * E)
    m = profile.meridian
    return ActionValue(root * m.total, float(E), root * m.error_estimate)


def action_energy_derivative(profile, E):
    """dJ/dE, exact from J being proportional to sqrt(E)."""
    if not E > 0:
        raise DomainError("action_energy_derivative needs E > 0")
    return half_action(profile, E).J / (2.0 * E)


def hamiltonian(profile, z, theta, p_z, p_theta, p_phi):
    """Geodesic Hamiltonian ``|p|^2 / 2`` in (z, theta, phi) coordinates."""
    if not abs(theta) < math.pi / 2:
        raise DomainError("|theta| must be < pi/2")
    f, fp, _ = eval_profile(profile, z)
    c = math.cos(theta)
    return 0.5 * (p_z * p_z / (fp * fp + 1.0) + p_theta * p_theta / (f * f)
                  + p_phi * p_phi / (f * f * c * c))


@dataclass
class MeridianOrbit:
    samples: np.ndarray  # columns t, z, p_z
    closed_action: float
    energy_drift: float
    clip_margin: float
    cap_action: float


def integrate_meridian_orbit(profile, E, tol=1e-10, clip=None):
    """Integrate the meridian geodesic (p_theta = p_phi = 0) from pole to pole.

    The flow is integrated numerically between ``z0 + clip`` and ``z1 - clip``;
    the two caps, where ``p_z`` diverges, are added from the arc-length
    quadrature and the return half follows from time reversal.
    """
    if not E > 0:
        raise DomainError("integrate_meridian_orbit needs E > 0")
    L = profile.length
    clip = 1e-3 * L if clip is None else float(clip)
    za, zb = profile.z0 + clip, profile.z1 - clip

    def rhs(t, y):
        z, p, _ = y
        _, fp, fpp = eval_profile(profile, z)
        g = fp * fp + 1.0
        zdot = p / g
        return [zdot, p * p * fp * fpp / (g * g), p * zdot]

    def reach_far(t, y):
        return y[0] - zb

    reach_far.terminal = True
    reach_far.direction = 1

    g0 = eval_profile(profile, za)[1] ** 2 + 1.0
    p0 = math.sqrt(2.0 * E * g0)
    t_max = 10.0 * meridian_length(profile) / math.sqrt(2.0 * E)
    sol = solve_ivp(rhs, (0.0, t_max), [za, p0, 0.0], method="DOP853",
                    rtol=min(tol, 1e-12) * 1e-1, atol=1e-14, events=reach_far,
                    dense_output=False)
    if sol.status != 1:
        raise NumericalError(
            f"orbit integration stopped before the far cap ({sol.message}); "
            "try a larger clip margin", achieved=float(sol.y[0, -1]))
    t, z, p, acc = sol.t, sol.y[0], sol.y[1], sol.y[2]
    _, fp, _ = eval_profile(profile, z)
    H = 0.5 * p * p / (fp * fp + 1.0)
    drift = float(np.max(np.abs(H - E)))
    root = math.sqrt(2.0 * E)
    caps_d = (geodesic_distance_from_pole(profile, za, "left")
              + geodesic_distance_from_pole(profile, zb, "right"))
    cap_action = root * caps_d
    closed = 2.0 * (float(acc[-1]) + cap_action)
    # return leg: time reversal through the far cap
    t_turn = t[-1] + 2.0 * geodesic_distance_from_pole(profile, zb, "right") / root
    back = np.column_stack([t_turn + (t[-1] - t[::-1]), z[::-1], -p[::-1]])
    samples = np.vstack([np.column_stack([t, z, p]), back])
    if drift > tol:
        raise NumericalError(f"energy drift {drift:.2e} exceeds tolerance {tol:.1e}",
                             achieved=drift)
    return MeridianOrbit(samples, closed, drift, clip, 2.0 * cap_action)
