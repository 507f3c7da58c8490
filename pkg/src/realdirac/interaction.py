"""Coupling of the real Dirac field to an external electromagnetic potential.

The potential enters through ``a = (e/K) A_beta eta^beta``.  Because the eta
matrices anticommute, ``a^2`` is the scalar ``(e/K)^2 A_beta A^beta`` times the
identity, so ``(1 + a)^{-1} = (1 - a) / (1 - a^2)`` wherever that scalar is not 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import METRIC, gammas, s_matrix
from .free_field import ETA, ETA0, N_MAT, bar, bilinear, dirac_op
from .sampling import FieldSampler, partials, raise_index

I8 = np.eye(8)
GAMMA = gammas()
S_A = s_matrix()[:4]
SINGULAR_TOL = 1e-12


class SingularCouplingError(ValueError):
    """``1 - (e/K)^2 A_beta A^beta`` vanishes, so ``F1`` does not exist."""


@dataclass(frozen=True)
class CouplingParams:
    e: float
    K: float
    kappa: float

    @property
    def ratio(self) -> float:
        return self.e / self.K


def a_scalar(A_value, e: float, K: float) -> np.ndarray:
    """``(e/K)^2 A_beta A^beta`` -- the multiple of the identity that equals ``a^2``."""
    A = np.asarray(A_value, dtype=float)
    return (e / K) ** 2 * np.sum(A * A * METRIC, axis=-1)


def a_op(A_value, e: float, K: float) -> np.ndarray:
    """``(e/K) A_beta eta^beta`` for contravariant ``A^beta``; batched over leading axes."""
    A_low = np.asarray(A_value, dtype=float) * METRIC
    return (e / K) * np.tensordot(A_low, ETA, axes=([-1], [0]))


def a_tilde(A_value, e: float, K: float) -> np.ndarray:
    """Four-component counterpart ``(e/K) A_beta gamma^beta``."""
    A_low = np.asarray(A_value, dtype=float) * METRIC
    return (e / K) * np.tensordot(A_low, GAMMA, axes=([-1], [0]))


def _denominator(A_value, e, K, tol=SINGULAR_TOL):
    s = 1.0 - a_scalar(A_value, e, K)
    bad = np.abs(s) <= tol
    if np.any(bad):
        where = np.asarray(A_value)[bad] if np.ndim(A_value) > 1 else np.asarray(A_value)
        raise SingularCouplingError(
            f"1 - (e/K)^2 A.A vanishes (|.| <= {tol:g}) for A = {np.asarray(where).tolist()}"
        )
    return s


def f1_f2(A_value, e: float, K: float, tol: float = SINGULAR_TOL) -> tuple[np.ndarray, np.ndarray]:
    """``F1 = (1 - a) / (1 - a^2)`` and ``F2 = 1 + a``; ``F1`` is the inverse of ``F2``."""
    s = _denominator(A_value, e, K, tol)
    a = a_op(A_value, e, K)
    return (I8 - a) / np.asarray(s)[..., None, None], I8 + a


def f1_f2_identities(A_value, e: float, K: float) -> dict:
    """Max deviations of ``F1 (1 + a) = 1``, ``F2 - F1^{-1} = 0`` and ``(F2 + F1^{-1})/2 = 1 + a``."""
    F1, F2 = f1_f2(A_value, e, K)
    a = a_op(A_value, e, K)
    F1_inv = np.linalg.inv(F1)
    return {
        "f1_times_one_plus_a": float(np.max(np.abs(F1 @ (I8 + a) - I8))),
        "f2_minus_f1_inverse": float(np.max(np.abs(F2 - F1_inv))),
        "half_sum_equals_one_plus_a": float(np.max(np.abs(0.5 * (F2 + F1_inv) - (I8 + a)))),
    }


def _apply(M, v):
    return np.einsum("...ij,...j->...i", M, v)


# ------------------------------------------------------------------ densities


def lagrangian_density_int(phi: FieldSampler, A: FieldSampler, params: CouplingParams, x,
                           h: float = 1e-3) -> np.ndarray:
    """``K [Psi-bar F1 Psi - kappa^2 Phi-bar F2 Phi]`` with ``Psi = D Phi``."""
    x = np.asarray(x, dtype=float)
    F1, F2 = f1_f2(A(x), params.e, params.K)
    Phi = phi(x)
    Psi = dirac_op(phi, x, h)
    val = bilinear(Psi, ETA0 @ F1, Psi) - params.kappa**2 * bilinear(Phi, ETA0 @ F2, Phi)
    return np.real(params.K * val)


def linear_current(phi: FieldSampler, params: CouplingParams, x, h: float = 1e-3) -> np.ndarray:
    """``j^a / c = e (Psi-bar eta^a Psi + kappa^2 Phi-bar eta^a Phi)`` with ``Psi = D Phi``."""
    Phi = phi(x)
    Psi = dirac_op(phi, x, h)
    dens = (np.einsum("...m,amn,...n->...a", bar(Psi), ETA, Psi)
            + params.kappa**2 * np.einsum("...m,amn,...n->...a", bar(Phi), ETA, Phi))
    return np.real(params.e * dens)


def linearized_lagrangian(phi: FieldSampler, A: FieldSampler, params: CouplingParams, x,
                          h: float = 1e-3) -> np.ndarray:
    """First-order expansion ``L_D - A_a j^a / c``."""
    from .free_field import lagrangian_density

    x = np.asarray(x, dtype=float)
    j = linear_current(phi, params, x, h)
    A_low = A(x) * METRIC
    return lagrangian_density(phi, params.kappa, params.K, x, h) - np.sum(A_low * j, axis=-1)


def hamiltonian_density_int(phi: FieldSampler, A: FieldSampler, params: CouplingParams, x,
                            h: float = 1e-3, c: float = 1.0) -> np.ndarray:
    """Interacting Hamiltonian density in terms of the canonical momenta.

    Both factors in front of the first and third terms are ``c``-based; with
    them the expression equals the Legendre transform of the interacting
    Lagrangian (see tests).
    """
    x = np.asarray(x, dtype=float)
    K, kappa = params.K, params.kappa
    F1, F2 = f1_f2(A(x), params.e, K)
    Phi = phi(x)
    d = partials(phi, x, h)
    Psi = np.einsum("amn,...an->...m", ETA, d)
    pi_plus = (K / c) * _apply(F1, Psi)            # column
    pi_row = np.conj(pi_plus)                       # row, (K/c) (F1 Psi)^+
    e0ej = np.einsum("mk,jkn->jmn", ETA0, ETA[1:])
    spatial = np.einsum("jmn,...jn->...m", e0ej, d[..., 1:, :])           # d_j eta^0 eta^j Phi
    spatial_row = np.einsum("...jn,jnm->...m", np.conj(d[..., 1:, :]), e0ej)  # d_j Phi-bar eta^j
    term1 = (c**2 / K) * np.sum(pi_row * _apply(ETA0 @ F2, pi_plus), axis=-1)
    term2 = -c * np.sum(pi_row * spatial, axis=-1)
    term3 = -c * np.sum(spatial_row * pi_plus, axis=-1)
    term4 = K * kappa**2 * bilinear(Phi, ETA0 @ F2, Phi)
    return np.real(term1 + term2 + term3 + term4)


def legendre_hamiltonian_int(phi: FieldSampler, A: FieldSampler, params: CouplingParams, x,
                             h: float = 1e-3, c: float = 1.0) -> np.ndarray:
    """``c Pi_Phi d_0 Phi + c d_0 Phi^+ Pi_Phi+ - L`` evaluated directly."""
    x = np.asarray(x, dtype=float)
    F1, _ = f1_f2(A(x), params.e, params.K)
    d = partials(phi, x, h)
    Psi = np.einsum("amn,...an->...m", ETA, d)
    pi_plus = (params.K / c) * _apply(F1, Psi)
    kin = c * np.sum(np.conj(pi_plus) * d[..., 0, :], axis=-1) + c * np.sum(np.conj(d[..., 0, :]) * pi_plus, axis=-1)
    return np.real(kin) - lagrangian_density_int(phi, A, params, x, h)


# ------------------------------------------------------------- field equations


def family_psi_int(phi: FieldSampler, A: FieldSampler, params: CouplingParams) -> FieldSampler:
    """Sampler for ``(1 + a) kappa N Phi``."""
    kN = params.kappa * N_MAT

    def value(x):
        x = np.asarray(x, dtype=float)
        return _apply(I8 + a_op(A(x), params.e, params.K), phi(x) @ kN.T)

    return FieldSampler(value)


def psi_one(phi: FieldSampler, psi: FieldSampler, A: FieldSampler, params: CouplingParams) -> FieldSampler:
    """``Psi_I = kappa Phi + i F1 Psi``; reduces to ``kappa (1 + i N) Phi`` on the family."""

    def value(x):
        x = np.asarray(x, dtype=float)
        F1, _ = f1_f2(A(x), params.e, params.K)
        return params.kappa * phi(x) + 1j * _apply(F1, psi(x))

    return FieldSampler(value)


def interacting_residual(phi: FieldSampler, A: FieldSampler, params: CouplingParams, x,
                         h: float = 1e-3) -> dict:
    """The interacting field equation in its real, eight-complex and four-complex forms.

    Returns the raw residual arrays under ``real_form`` (real, ``[D - kappa(1+a)N] Phi``),
    ``complex8_form`` (``[iD - kappa(1+a)] Psi_I``) and ``complex4_form``
    (``[i gamma.d - kappa(1 + a~)] phi_a`` with ``phi_a = (S Phi)_a``), plus
    their max-abs values under ``*_max``.
    """
    x = np.asarray(x, dtype=float)
    kappa, e, K = params.kappa, params.e, params.K
    A_val = A(x)
    a = a_op(A_val, e, K)
    Phi = phi(x)

    r_real = dirac_op(phi, x, h) - kappa * _apply(I8 + a, Phi @ N_MAT.T)

    psi_I = phi.map(kappa * (I8 + 1j * N_MAT))
    r_c8 = 1j * dirac_op(psi_I, x, h) - kappa * _apply(I8 + a, psi_I(x))

    phi_a = phi.map(S_A)
    d4 = partials(phi_a, x, h)
    at = a_tilde(A_val, e, K)
    r_c4 = (1j * np.einsum("amn,...an->...m", GAMMA, d4)
           - kappa * _apply(np.eye(4) + at, phi_a(x)))

    out = {"real_form": r_real, "complex8_form": r_c8, "complex4_form": r_c4}
    for key in list(out):
        out[f"{key}_max"] = float(np.max(np.abs(out[key]), initial=0.0))
    return out


def em_source(phi: FieldSampler, psi: FieldSampler, A: FieldSampler, params: CouplingParams, x,
              h: float = 1e-3) -> np.ndarray:
    """Right-hand side of the wave equation for ``A^a`` (no external current)."""
    x = np.asarray(x, dtype=float)
    e, K, kappa = params.e, params.K, params.kappa
    A_val = A(x)
    s = _denominator(A_val, e, K)[..., None]
    a = a_op(A_val, e, K)
    Phi, Psi = phi(x), psi(x)
    t1 = kappa**2 * np.einsum("...m,amn,...n->...a", bar(Phi), ETA, Phi)
    t2 = np.einsum("...m,amn,...n->...a", bar(Psi), ETA, Psi) / s
    t3 = -2 * (e / K) * A_val * bilinear(Psi, ETA0 @ (I8 - a), Psi)[..., None] / s**2
    return np.real(4 * np.pi * e * (t1 + t2 + t3))


def em_source_family(phi: FieldSampler, params: CouplingParams, x) -> np.ndarray:
    """Reduced source ``4 pi e 2 kappa^2 Phi-bar eta^a Phi`` for the family solutions."""
    Phi = phi(np.asarray(x, dtype=float))
    dens = np.einsum("...m,amn,...n->...a", bar(Phi), ETA, Phi)
    return np.real(4 * np.pi * params.e * 2 * params.kappa**2 * dens)


def canonical_check_int(phi: FieldSampler, A: FieldSampler, params: CouplingParams, x,
                        h: float = 1e-3, c: float = 1.0) -> dict:
    """Momenta and residuals of the four interacting canonical equations.

    The first two only restate ``Psi = D Phi`` through the momenta; the last
    two carry the dynamics.  Residual maxima are keyed ``canonical_1`` .. ``canonical_4``.
    """
    x = np.asarray(x, dtype=float)
    e, K, kappa = params.e, params.K, params.kappa
    F1, F2 = f1_f2(A(x), e, K)
    Phi = phi(x)
    Psi = dirac_op(phi, x, h)
    pi_plus = (K / c) * _apply(F1, Psi)
    pi_row = (K / c) * np.einsum("...m,...mn->...n", bar(Psi), (I8 - a_op(A(x), e, K)) @ ETA0) \
        / (1.0 - a_scalar(A(x), e, K))[..., None]

    chi = FieldSampler(lambda y: _apply(f1_f2(A(y), e, K)[0], dirac_op(phi, y, h)))
    d_chi = dirac_op(chi, x, h)  # D((c/K) Pi_Phi+)

    r1 = Psi - _apply(F2, (c / K) * pi_plus)
    r2 = bar(Psi) - np.einsum("...m,...mn->...n", (c / K) * pi_row, ETA0 @ F2)
    r3 = d_chi + kappa**2 * _apply(F2, Phi)
    r4 = bar(d_chi) + kappa**2 * np.einsum("...m,...mn->...n", bar(Phi), F2)
    res = {"canonical_1": r1, "canonical_2": r2, "canonical_3": r3, "canonical_4": r4}
    report = {k: float(np.max(np.abs(v), initial=0.0)) for k, v in res.items()}
    report["pi_phi"] = pi_row
    report["pi_phiplus"] = pi_plus
    return report


# ------------------------------------------------- conserved quantities (Psi_I)


def momentum_from_psi1(psi1: FieldSampler, kappa: float, K: float, quad, t: float = 0.0,
                       const_P: float = 1.0, h: float = 1e-3) -> np.ndarray:
    """``const_P (K/2kappa) integral [Psi1^+ i d^a Psi1 + c.c.]``."""
    x = quad.at(t)
    v = psi1(x)
    d = raise_index(partials(psi1, x, h))
    dens = np.einsum("...n,...an->...a", np.conj(v), 1j * d)
    return const_P * (K / (2 * kappa)) * quad.integrate(2 * np.real(dens))


def spin_s3_from_psi1(psi1: FieldSampler, kappa: float, K: float, quad, t: float = 0.0,
                      const_M: float = 1.0) -> float:
    """``const_M (K/4kappa) integral [Psi1^+ eta^1 eta^2 i Psi1 + c.c.]``."""
    v = psi1(quad.at(t))
    dens = 2 * np.real(1j * bilinear(v, ETA[1] @ ETA[2], v))
    return float(const_M * (K / (4 * kappa)) * quad.integrate(dens))
