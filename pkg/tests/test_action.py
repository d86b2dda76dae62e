import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdspec.action import (action_energy_derivative, half_action, hamiltonian,
                           integrate_meridian_orbit)
from sdspec.errors import DomainError
from sdspec.surface import metric_at


@pytest.mark.parametrize("E,J", [(0.5, math.pi), (2.0, 2 * math.pi), (0.25, math.pi / math.sqrt(2))])
def test_sphere_action(sphere, E, J):
    val = half_action(sphere, E)
    assert val.J == pytest.approx(J, rel=1e-12)
    assert val.quadrature_error_estimate <= 1e-10 * val.J


def test_tilted_action_against_frozen_quadrature(tilted, frozen):
    ref = frozen["meridian_length"]["omega_1_0.3z"]
    assert half_action(tilted, 0.5).J == pytest.approx(ref, rel=1e-9)


def test_tilted_action_against_adaptive_quadrature(tilted):
    # independent: mpmath tanh-sinh on the raw integrand, endpoints singular
    def g(z):
        w, dw = 1 + mp.mpf("0.3") * z, mp.mpf("0.3")
        r = (1 - z) * (z + 1)
        fp = (-2 * z) * w / (2 * mp.sqrt(r)) + mp.sqrt(r) * dw
        return mp.sqrt(fp * fp + 1)

    with mp.workdps(30):
        ref = float(mp.quad(g, [-1, 0, 1]))
    assert half_action(tilted, 0.5).J == pytest.approx(ref, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 50.0), st.floats(1e-2, 100.0))
def test_homogeneity(E, lam):
    from sdspec.surface import SurfaceProfile

    prof = SurfaceProfile.from_coefficients(-1.0, 1.0, [1.0, 0.3])
    assert half_action(prof, lam * E).J == pytest.approx(
        math.sqrt(lam) * half_action(prof, E).J, rel=1e-12)


def test_energy_derivative(sphere, tilted):
    assert action_energy_derivative(sphere, 0.5) == pytest.approx(math.pi)
    assert action_energy_derivative(sphere, 2.0) == pytest.approx(math.pi / 2)
    step = 1e-5
    fd = (half_action(tilted, 0.7 + step).J - half_action(tilted, 0.7 - step).J) / (2 * step)
    assert action_energy_derivative(tilted, 0.7) == pytest.approx(fd, abs=1e-7)
    with pytest.raises(DomainError):
        action_energy_derivative(sphere, 0.0)


def test_hamiltonian(sphere, tilted):
    assert hamiltonian(sphere, 0.0, 0.0, 1.0, 0.0, 0.0) == pytest.approx(0.5)
    assert hamiltonian(sphere, 0.0, 0.0, 0.0, 1.0, 0.0) == pytest.approx(0.5)
    z, th, p = 0.3, 0.4, (0.7, -1.1, 0.5)
    m = metric_at(tilted, z, th)
    ref = 0.5 * (p[0] ** 2 / m.g_zz + p[1] ** 2 / m.g_thth + p[2] ** 2 / m.g_phph)
    assert hamiltonian(tilted, z, th, *p) == pytest.approx(ref, rel=1e-14)
    with pytest.raises(DomainError):
        hamiltonian(sphere, 1.0, 0.0, 1.0, 0.0, 0.0)


@pytest.mark.parametrize("E", [0.25, 0.5, 1.0])
def test_orbit_closes_with_twice_the_action(profile, E):
    orbit = integrate_meridian_orbit(profile, E)
    twoJ = 2 * half_action(profile, E).J
    assert abs(orbit.closed_action - twoJ) / twoJ <= 1e-6
    assert orbit.energy_drift <= 1e-9
    assert orbit.closed_action > 0


def test_orbit_samples_conserve_energy(sphere):
    orbit = integrate_meridian_orbit(sphere, 0.5)
    for t, z, pz in orbit.samples[:: max(1, len(orbit.samples) // 20)]:
        if sphere.z0 < z < sphere.z1:
            assert hamiltonian(sphere, z, 0.0, pz, 0.0, 0.0) == pytest.approx(0.5, abs=1e-9)
