import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import simpson

from realdirac.hydrogen import (
    ALPHA_FS, coulomb_potential, hydrogen_conserved, hydrogen_ground_state, hydrogen_phi,
    hydrogen_phi_table, hydrogen_residuals, hydrogen_sample_points, hydrogen_spinor,
    shoot_ground_state, singular_radius,
)
from realdirac.interaction import interacting_residual, a_scalar, canonical_check_int, em_source, em_source_family, family_psi_int
from realdirac.representations import to_dirac
from realdirac.sampling import FieldSampler


@pytest.fixture(scope="module")
def state():
    return hydrogen_ground_state()


def test_k0_formula(state):
    assert state.k0 == pytest.approx(np.sqrt(1 - ALPHA_FS**2), abs=1e-15)
    assert state.k0 < state.kappa


@given(st.floats(1e-4, 0.3))
def test_radial_normalization(za):
    st_ = hydrogen_ground_state(Z=1.0, alpha_fs=za)
    r = np.geomspace(1e-8, 80, 20001) / za
    integrand = (st_.g(r) ** 2 + st_.f(r) ** 2) * r**3
    assert simpson(integrand, x=np.log(r)) == pytest.approx(1.0, rel=1e-5)


def test_nonrelativistic_limit():
    st_ = hydrogen_ground_state(alpha_fs=1e-6)
    r = np.array([1e5, 1e6])
    assert np.all(np.abs(st_.f(r) / st_.g(r)) < 1e-6)
    assert st_.k0 == pytest.approx(1.0, abs=1e-11)


def test_supercritical_rejected():
    with pytest.raises(ValueError, match="supercritical"):
        hydrogen_ground_state(Z=137.1)


def test_shooting_matches_analytic(state):
    sh = shoot_ground_state()
    assert abs(sh.k0 - state.k0) < 1e-8
    m = (sh.r >= 0.01 * state.bohr) & (sh.r <= 20 * state.bohr)
    for num, exact in ((sh.g, state.g), (sh.f, state.f)):
        ref = exact(sh.r[m])
        assert np.abs(num[m] - ref).max() / np.abs(ref).max() < 1e-8


def test_shooting_other_charge():
    st_ = hydrogen_ground_state(Z=20)
    sh = shoot_ground_state(Z=20)
    assert sh.k0 == pytest.approx(st_.k0, abs=1e-8)


def test_phi_block_properties(state):
    rng = np.random.default_rng(1)
    x = hydrogen_sample_points(state, 50, seed=2)
    v = hydrogen_phi(state)(x)
    r = np.linalg.norm(x[:, 1:], axis=1)
    assert np.allclose(np.sum(v * v, axis=1), (state.g(r) ** 2 + state.f(r) ** 2) / (2 * np.pi), rtol=1e-12)
    axis = np.array([[rng.uniform(0, 5), 0.0, 0.0, 50.0]])
    assert np.allclose(hydrogen_phi(state)(axis)[0, 6:], 0.0, atol=1e-18)
    assert np.allclose(to_dirac(v).phi_a, hydrogen_spinor(state)(x), atol=1e-15)


def test_table_matches_assembly(state):
    x = hydrogen_sample_points(state, 20, seed=3)
    assert np.allclose(hydrogen_phi_table(state, x), hydrogen_phi(state)(x), rtol=0, atol=1e-18)


def test_missing_condon_shortley_phase_breaks_solution(state):
    x = hydrogen_sample_points(state, 40, seed=3)
    alt = hydrogen_phi_table(state, x, condon_shortley=False)
    ref = hydrogen_phi(state)(x)
    assert np.allclose(alt[:, :6], ref[:, :6], rtol=0, atol=1e-18)
    assert np.allclose(alt[:, 6:], -ref[:, 6:])
    phi = FieldSampler(lambda y: hydrogen_phi_table(state, y, condon_shortley=False))
    res = interacting_residual(phi, coulomb_potential(), state.coupling_params(), x)
    assert res["complex4_form_max"] / np.abs(hydrogen_spinor(state)(x)).max() > 1e-3


def test_residuals_small(state):
    res = hydrogen_residuals(state)
    assert max(res["real_form_max"], res["complex8_form_max"], res["complex4_form_max"]) < 1e-8


def test_wrong_energy_detected(state):
    from dataclasses import replace
    bad = replace(state, k0=state.k0 * (1 + 1e-4))
    assert hydrogen_residuals(bad)["complex4_form_max"] > 1e-6


def test_canonical_and_source(state):
    x = hydrogen_sample_points(state, 40, seed=4)
    phi, A, par = hydrogen_phi(state), coulomb_potential(), state.coupling_params()
    scale = np.abs(hydrogen_spinor(state)(x)).max()
    rep = canonical_check_int(phi, A, par, x)
    assert max(rep[k] for k in ("canonical_1", "canonical_2", "canonical_3", "canonical_4")) / scale < 1e-8
    full = em_source(phi, family_psi_int(phi, A, par), A, par, x)
    assert np.abs(full - em_source_family(phi, par, x)).max() < 1e-9


def test_conserved_after_normalization(state):
    c = hydrogen_conserved(state)
    assert c["Q"] == pytest.approx(1.0, abs=1e-8)
    assert c["P0"] == pytest.approx(state.k0, abs=1e-8)
    assert c["norm_integral_quadrature"] == pytest.approx(4 * np.pi, rel=1e-8)
    assert c["excluded_charge"] < 1e-10
    later = hydrogen_conserved(state, t=7.5)
    assert later["Q"] == pytest.approx(c["Q"], abs=1e-12)


def test_singular_radius_is_on_the_shell(state):
    rs = singular_radius(1.0, ALPHA_FS, 1.0)
    A = coulomb_potential()(np.array([0.0, rs, 0.0, 0.0]))
    par = state.coupling_params()
    assert a_scalar(A, par.e, par.K) == pytest.approx(1.0)
