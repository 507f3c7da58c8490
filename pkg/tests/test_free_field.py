import numpy as np
import pytest
from hypothesis import given, strategies as st

from realdirac.free_field import (
    CANONICAL_KEYS, ETA, N_MAT, PlaneWaveParams, bilinear, canonical_check, dirac4_residual, dirac_op,
    family_residual, hamiltonian_density, klein_gordon_residual, lagrangian_density, maxwell_assemble,
    maxwell_residual, plane_wave_dirac, plane_wave_phi, sin_t_potentials, vacuum_wave_potentials,
)
from realdirac.representations import to_dirac
from realdirac.sampling import FieldSampler, random_harmonic_field

from conftest import random_events


def test_plane_wave_closed_form_components():
    p = PlaneWaveParams(1.0, 1.0)
    x = np.array([0.3, 0.0, 0.0, 0.7])
    th = p.k0 * 0.3 - 0.7
    amp = np.sqrt((p.k0 + 1) / p.k0)
    b = 1 / (p.k0 + 1)
    expected = amp * np.array([-np.cos(th), -np.sin(th), 0, 0, b * np.sin(th), -b * np.cos(th), 0, 0])
    assert np.allclose(plane_wave_phi(p)(x), expected, atol=1e-15)


@given(st.floats(0.1, 5), st.floats(-5, 5), st.floats(-20, 20), st.floats(-20, 20))
def test_plane_wave_norm_is_two(kappa, k, t, z):
    v = plane_wave_phi(PlaneWaveParams(kappa, k))(np.array([t, 0.0, 0.0, z]))
    assert abs(v @ v - 2.0) < 1e-12


def test_plane_wave_solves_family_and_kg(rng):
    p = PlaneWaveParams.from_mode(2.0, 3, np.pi)
    x = random_events(rng)
    phi = plane_wave_phi(p)
    assert np.abs(family_residual(phi, p.kappa, x)).max() < 1e-12 * p.k0**2
    assert np.abs(klein_gordon_residual(phi, p.kappa, x)).max() < 1e-11 * p.k0**2


def test_exact_and_fd_derivatives_agree(rng):
    p = PlaneWaveParams(1.0, 1.0)
    phi = plane_wave_phi(p)
    fd = FieldSampler(phi.value)
    x = random_events(rng, 20)
    assert np.abs(dirac_op(phi, x) - dirac_op(fd, x)).max() < 1e-10


def test_dispersion_violation_is_detected(rng):
    p = PlaneWaveParams(1.0, 1.0)
    phi = plane_wave_phi(p, k0=1.2)
    assert np.abs(family_residual(phi, 1.0, random_events(rng))).max() > 1e-2


def test_s_transform_gives_dirac_plane_wave(rng):
    p = PlaneWaveParams(1.3, -0.7)
    x = random_events(rng, 30)
    assert np.allclose(to_dirac(plane_wave_phi(p)(x)).phi_a, plane_wave_dirac(p)(x), atol=1e-14)
    assert np.abs(dirac4_residual(plane_wave_dirac(p), x, p.kappa)).max() < 1e-12


def test_commensurability():
    assert PlaneWaveParams.from_mode(1.0, 3).is_commensurate()
    assert not PlaneWaveParams(1.0, 1.0, 6.0).is_commensurate()
    with pytest.raises(ValueError):
        PlaneWaveParams(0.0, 0.0)


def test_vacuum_wave_satisfies_maxwell(rng):
    em = vacuum_wave_potentials(direction=(1.0, 2.0, 0.5), polarization=(0, 0, 1), omega=1.7)
    x = random_events(rng)
    r1, r2 = maxwell_residual(em, x)
    assert np.abs(r1).max() < 1e-10 and np.abs(r2).max() < 1e-10
    assert np.abs(maxwell_assemble(em, x) - dirac_op(em.phi_column(), x)).max() < 1e-10


def test_vacuum_wave_psi_solves_d_psi_zero(rng):
    em = vacuum_wave_potentials(omega=1.1)
    psi = FieldSampler(lambda y: maxwell_assemble(em, y))
    assert np.abs(dirac_op(psi, random_events(rng, 20))).max() < 1e-8


def test_sin_t_is_not_a_vacuum_solution(rng):
    r1, _ = maxwell_residual(sin_t_potentials(), random_events(rng))
    assert np.abs(r1).max() > 0.1


def test_polarization_parallel_rejected():
    with pytest.raises(ValueError):
        vacuum_wave_potentials(direction=(0, 0, 1), polarization=(0, 0, 2))


def test_canonical_equations_on_plane_wave(rng):
    p = PlaneWaveParams(1.0, 2.0)
    rep = canonical_check(plane_wave_phi(p), 1.0, 1.0, random_events(rng, 50))
    for key in CANONICAL_KEYS:
        assert rep[key] < 1e-11, key
    assert np.allclose(rep["pi_phiplus"], dirac_op(plane_wave_phi(p), random_events(np.random.default_rng(12345), 50)))


def test_canonical_equations_flag_random_field(rng):
    rep = canonical_check(random_harmonic_field(seed=3), 1.0, 1.0, random_events(rng, 20))
    assert rep["pi_phiplus_dot"] > 1e-3 and rep["klein_gordon"] > 1e-3


def test_lagrangian_vanishes_and_hamiltonian_positive_for_family(rng):
    # Psi = kappa N Phi makes Psi-bar Psi = kappa^2 Phi-bar Phi
    p = PlaneWaveParams(1.0, 1.0)
    x = random_events(rng, 30)
    assert np.abs(lagrangian_density(plane_wave_phi(p), 1.0, 1.0, x)).max() < 1e-12
    H = hamiltonian_density(plane_wave_phi(p), 1.0, 1.0, x)
    assert np.all(np.isfinite(H))
    with pytest.raises(ValueError):
        lagrangian_density(plane_wave_phi(p), 1.0, 0.0, x)


def test_bilinear_batched():
    u = np.ones((3, 8))
    assert np.allclose(bilinear(u, np.eye(8), u), 8.0)
    assert ETA.shape == (4, 8, 8) and N_MAT.shape == (8, 8)
