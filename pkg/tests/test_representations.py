import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from realdirac.algebra import n_b, n_matrix
from realdirac.representations import (
    DiracPair, RealityError, compose_psi12, decompose_psi12, family_psi, from_dirac,
    pair_constraint_residual, to_dirac,
)

real8 = arrays(float, 8, elements=st.floats(-5, 5, allow_nan=False))
cplx4 = st.tuples(arrays(float, 4, elements=st.floats(-5, 5, allow_nan=False)),
                  arrays(float, 4, elements=st.floats(-5, 5, allow_nan=False)))


@given(real8)
def test_real_field_pair_constraint(phi):
    pair = to_dirac(phi)
    assert pair_constraint_residual(pair) < 1e-12


@given(real8)
def test_roundtrip_real(phi):
    assert np.allclose(from_dirac(to_dirac(phi).phi_a), phi, atol=1e-12)


@given(cplx4)
def test_roundtrip_spinor(parts):
    phi_a = parts[0] + 1j * parts[1]
    back = to_dirac(from_dirac(phi_a))
    assert np.allclose(back.phi_a, phi_a, atol=1e-12)
    assert np.allclose(back.phi_b, phi_a.conj() @ n_b().T, atol=1e-12)


@given(real8, real8, st.floats(0.1, 5))
def test_psi12_roundtrip(phi, psi, kappa):
    p1, p2 = compose_psi12(phi, psi, kappa)
    assert np.allclose(p2, p1.conj())
    a, b = decompose_psi12(p1, p2, kappa)
    assert np.allclose(a, phi) and np.allclose(b, psi)


def test_decompose_rejects_non_conjugate_pair():
    p1 = np.ones(8, dtype=complex)
    with pytest.raises(RealityError) as err:
        decompose_psi12(p1, p1 + 0.1j, 1.0)
    assert err.value.residual > err.value.tol


def test_compose_needs_kappa():
    with pytest.raises(ValueError):
        compose_psi12(np.zeros(8), np.zeros(8), 0.0)


def test_family_psi_is_kappa_n_phi():
    phi = np.arange(8.0)
    assert np.allclose(family_psi(phi, 2.0), 2.0 * n_matrix() @ phi)
    assert np.allclose(family_psi(family_psi(phi, 1.0), 1.0), -phi)


def test_batched_to_dirac():
    phi = np.random.default_rng(0).normal(size=(3, 5, 8))
    pair = to_dirac(phi)
    assert isinstance(pair, DiracPair)
    assert pair.phi_a.shape == (3, 5, 4)
