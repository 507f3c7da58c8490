"""Free real Dirac field: the operator D, exact plane waves, Maxwell slots and densities.

Natural units (hbar = c = 1) throughout; ``c`` is kept as an explicit keyword
only where it appears in the canonical momenta.  Coordinates are
``x = (x0, x, y, z)`` with metric (+, -, -, -); ``d_alpha`` is the derivative
with respect to ``x^alpha``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import METRIC, etas, n_matrix
from .sampling import FieldSampler, dalembertian, partials, second_partials

ETA = etas().astype(float)
N_MAT = n_matrix().astype(float)
ETA0 = ETA[0]


def _levi_civita() -> np.ndarray:
    eps = np.zeros((4, 4, 4, 4))
    for perm in itertools.permutations(range(4)):
        inversions = sum(perm[i] > perm[j] for i in range(4) for j in range(i + 1, 4))
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


# upper-index epsilon with eps^{0123} = +1
LEVI_CIVITA = _levi_civita()


def bar(v) -> np.ndarray:
    """Dirac adjoint row ``v^+ eta^0``."""
    return np.conj(v) @ ETA0


def bilinear(u, M, v) -> np.ndarray:
    """``u^+ M v`` over the last axis (M may be batched as ``(..., 8, 8)``)."""
    Mv = np.einsum("...ij,...j->...i", M, v) if np.ndim(M) > 2 else v @ np.asarray(M).T
    return np.sum(np.conj(u) * Mv, axis=-1)


def dirac_from_partials(d: np.ndarray) -> np.ndarray:
    """``sum_alpha eta^alpha d_alpha`` for partials of shape ``(..., 4, 8)``."""
    return np.einsum("amn,...an->...m", ETA, d)


def dirac_op(sampler: FieldSampler, x, h: float = 1e-3) -> np.ndarray:
    """Apply ``D = eta^alpha d_alpha`` to an 8-component field at ``x``."""
    return dirac_from_partials(partials(sampler, x, h))


def dirac_sampler(sampler: FieldSampler, h: float = 1e-3) -> FieldSampler:
    """Sampler for ``D phi`` whose gradient uses the second partials of ``phi``."""

    def value(x):
        return dirac_op(sampler, x, h)

    grad = None
    if sampler.grad is not None or sampler.hess is not None:
        def grad(x):
            H = second_partials(sampler, x, h)  # (..., 4 outer, 4 inner, 8)
            return np.einsum("bmn,...abn->...am", ETA, H)

    return FieldSampler(value, grad)


# ---------------------------------------------------------------- plane waves


@dataclass(frozen=True)
class PlaneWaveParams:
    kappa: float
    k: float
    box_L: float = 2 * np.pi

    def __post_init__(self):
        if self.k0 <= 0:
            raise ValueError("k0 = sqrt(kappa^2 + k^2) must be positive")
        if self.box_L <= 0:
            raise ValueError("box_L must be positive")

    @property
    def k0(self) -> float:
        return float(np.hypot(self.kappa, self.k))

    @property
    def mode(self) -> float:
        """Number of wavelengths in the box, ``k L / 2 pi``."""
        return self.k * self.box_L / (2 * np.pi)

    def is_commensurate(self, tol: float = 1e-9) -> bool:
        return abs(self.mode - round(self.mode)) < tol

    @classmethod
    def from_mode(cls, kappa: float, mode: int, box_L: float = 2 * np.pi) -> "PlaneWaveParams":
        return cls(kappa, 2 * np.pi * mode / box_L, box_L)


def _phase(params: PlaneWaveParams, x, k0: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return k0 * x[..., 0] - params.k * x[..., 3]


def plane_wave_phi(params: PlaneWaveParams, k0: Optional[float] = None) -> FieldSampler:
    """The real stationary plane wave of the family ``(D - kappa N) phi = 0`` moving along z.

    ``k0`` overrides the frequency (default ``sqrt(kappa^2 + k^2)``); any other
    value breaks the dispersion relation and is only useful as a negative control.
    """
    kappa, k = params.kappa, params.k
    w = params.k0 if k0 is None else float(k0)
    amp = np.sqrt((w + kappa) / w)
    b = k / (w + kappa)
    wvec = np.array([w, 0.0, 0.0, -k])

    def shape(th):
        c, s = np.cos(th), np.sin(th)
        z = np.zeros_like(th)
        return amp * np.stack([-c, -s, z, z, b * s, -b * c, z, z], axis=-1)

    def dshape(th):
        c, s = np.cos(th), np.sin(th)
        z = np.zeros_like(th)
        return amp * np.stack([s, -c, z, z, b * c, b * s, z, z], axis=-1)

    def value(x):
        return shape(_phase(params, x, w))

    def grad(x):
        return wvec[:, None] * dshape(_phase(params, x, w))[..., None, :]

    def hess(x):
        return -np.multiply.outer(wvec, wvec)[..., None] * shape(_phase(params, x, w))[..., None, None, :]

    return FieldSampler(value, grad, hess)


def plane_wave_dirac(params: PlaneWaveParams) -> FieldSampler:
    """Positive-energy four-component spinor ``u e^{-i(k0 x0 - k z)}`` moving along z."""
    kappa, k, k0 = params.kappa, params.k, params.k0
    u = np.sqrt((k0 + kappa) / (2 * k0)) * np.array([1.0, 0.0, k / (k0 + kappa), 0.0], dtype=complex)
    wvec = np.array([k0, 0.0, 0.0, -k])

    def value(x):
        return np.exp(-1j * _phase(params, x, k0))[..., None] * u

    def grad(x):
        return -1j * wvec[:, None] * value(x)[..., None, :]

    def hess(x):
        return -np.multiply.outer(wvec, wvec)[..., None] * value(x)[..., None, None, :]

    return FieldSampler(value, grad, hess)


def dirac4_residual(sampler: FieldSampler, x, mass: float, h: float = 1e-3) -> np.ndarray:
    """``(i gamma^alpha d_alpha - mass) phi`` for a four-component field."""
    from .algebra import gammas

    d = partials(sampler, x, h)
    return 1j * np.einsum("amn,...an->...m", gammas(), d) - mass * sampler(x)


# ------------------------------------------------------- Maxwell correspondence


@dataclass(frozen=True)
class EMPotentials:
    """Potential 4-vector ``A^alpha`` and dual potential ``C^alpha`` (contravariant).

    ``phi_scalar = A^0`` and ``f = C^0``.
    """

    A: FieldSampler
    C: FieldSampler

    def phi_column(self) -> FieldSampler:
        """The 8-component column ``(-A_x, -A_y, -A_z, f, C_x, C_y, C_z, -phi)``."""
        P = np.zeros((8, 8))
        P[0, 1] = P[1, 2] = P[2, 3] = -1.0  # -A^i
        P[3, 4] = 1.0                       # f = C^0
        P[4, 5] = P[5, 6] = P[6, 7] = 1.0   # C^i
        P[7, 0] = -1.0                      # -phi = -A^0
        return _stack_samplers(self.A, self.C).map(P)


def _stack_samplers(a: FieldSampler, b: FieldSampler) -> FieldSampler:
    def cat(fa, fb):
        if fa is None or fb is None:
            return None
        return lambda x: np.concatenate([fa(x), fb(x)], axis=-1)

    return FieldSampler(cat(a.value, b.value), cat(a.grad, b.grad), cat(a.hess, b.hess))


def _field_tensors(dA: np.ndarray, dC: np.ndarray):
    """Field tensors from partials ``d_xi V^zeta`` laid out ``(..., xi, zeta)``."""
    g = METRIC.astype(float)
    up = dA * g[:, None]            # d^xi A^zeta
    upC = dC * g[:, None]
    dA_low = dA * g[None, :]        # d_xi A_zeta
    dC_low = dC * g[None, :]
    curlA = dA_low - np.swapaxes(dA_low, -1, -2)
    curlC = dC_low - np.swapaxes(dC_low, -1, -2)
    F = up - np.swapaxes(up, -1, -2) - 0.5 * np.einsum("abxz,...xz->...ab", LEVI_CIVITA, curlC)
    Fd = upC - np.swapaxes(upC, -1, -2) + 0.5 * np.einsum("abxz,...xz->...ab", LEVI_CIVITA, curlA)
    divC = np.einsum("...aa->...", dC)
    divA = np.einsum("...aa->...", dA)
    return F, Fd, divC, divA


def maxwell_fields(em: EMPotentials, x, h: float = 1e-3) -> dict:
    """``F^{ab}``, dual ``F~^{ab}``, and the scalars ``F = d_a C^a``, ``G = d_a A^a``."""
    F, Fd, Fs, G = _field_tensors(partials(em.A, x, h), partials(em.C, x, h))
    return {"F": F, "F_dual": Fd, "F_scalar": Fs, "G": G}


def pack_psi(F: np.ndarray, F_scalar, G) -> np.ndarray:
    """Column ``(E, F, B, G)`` with ``E_i = F^{i0}`` and ``B`` read off the layout of ``F^{ab}``."""
    return np.stack(
        [F[..., 1, 0], F[..., 2, 0], F[..., 3, 0], F_scalar,
         F[..., 3, 2], F[..., 1, 3], F[..., 2, 1], G],
        axis=-1,
    )


def maxwell_assemble(em: EMPotentials, x, h: float = 1e-3) -> np.ndarray:
    """Build ``(E, F, B, G)`` from the potentials; equals ``D`` applied to :meth:`EMPotentials.phi_column`."""
    f = maxwell_fields(em, x, h)
    return pack_psi(f["F"], f["F_scalar"], f["G"])


def maxwell_residual(em: EMPotentials, x, h: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
    """``d_a(F^{ab} + g^{ab} G)`` and ``d_a(F~^{ab} + g^{ab} F)``."""
    ddA = second_partials(em.A, x, h)  # (..., gamma, xi, zeta)
    ddC = second_partials(em.C, x, h)
    # field tensors are linear in the partials: differentiate by feeding d_gamma d_xi V
    F, Fd, Fs, G = _field_tensors(ddA, ddC)  # (..., gamma, a, b), (..., gamma)
    g = METRIC.astype(float)
    r1 = np.einsum("...aab->...b", F) + g * G
    r2 = np.einsum("...aab->...b", Fd) + g * Fs
    return r1, r2


def vacuum_wave_potentials(direction=(0.0, 0.0, 1.0), polarization=(1.0, 0.0, 0.0),
                           omega: float = 1.0, phase: float = 0.0) -> EMPotentials:
    """Lorenz-gauge vacuum wave ``A^alpha = eps^alpha sin(k.x)`` with ``k^2 = 0``, ``k.eps = 0``; ``C = 0``."""
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    pol = np.asarray(polarization, dtype=float)
    pol = pol - np.dot(pol, n) * n
    if np.linalg.norm(pol) == 0:
        raise ValueError("polarization must not be parallel to the direction")
    pol = pol / np.linalg.norm(pol)
    k_up = omega * np.concatenate([[1.0], n])
    k_low = k_up * METRIC
    eps = np.concatenate([[0.0], pol])
    return EMPotentials(_harmonic_vector(eps, k_low, phase), _zero_vector())


def sin_t_potentials(amplitude: float = 1.0) -> EMPotentials:
    """``A^1 = amplitude * sin(x^0)``, uniform in space; not a vacuum solution."""
    eps = np.array([0.0, amplitude, 0.0, 0.0])
    return EMPotentials(_harmonic_vector(eps, np.array([1.0, 0.0, 0.0, 0.0]), 0.0), _zero_vector())


def _harmonic_vector(eps: np.ndarray, k_low: np.ndarray, phase: float) -> FieldSampler:
    """``V^a = eps^a sin(k_b x^b + phase)`` with exact derivatives."""

    def arg(x):
        return np.asarray(x, dtype=float) @ k_low + phase

    def value(x):
        return np.sin(arg(x))[..., None] * eps

    def grad(x):
        return np.cos(arg(x))[..., None, None] * np.multiply.outer(k_low, eps)

    def hess(x):
        kk = np.multiply.outer(np.multiply.outer(k_low, k_low), eps)
        return -np.sin(arg(x))[..., None, None, None] * kk

    return FieldSampler(value, grad, hess)


def _zero_vector() -> FieldSampler:
    from .sampling import constant

    return constant(np.zeros(4))


# ---------------------------------------------------------------- densities


def lagrangian_density(phi: FieldSampler, kappa: float, K: float, x, h: float = 1e-3) -> np.ndarray:
    """``K (Psi-bar Psi - kappa^2 Phi-bar Phi)`` with ``Psi = D Phi``."""
    if K <= 0:
        raise ValueError("K must be positive")
    Phi = phi(x)
    Psi = dirac_op(phi, x, h)
    return np.real(K * (bilinear(Psi, ETA0, Psi) - kappa**2 * bilinear(Phi, ETA0, Phi)))


def hamiltonian_density(phi: FieldSampler, kappa: float, K: float, x, h: float = 1e-3,
                        c: float = 1.0) -> np.ndarray:
    """Canonical Hamiltonian density written in the momenta (massive case included)."""
    Phi = phi(x)
    d = partials(phi, x, h)
    Psi = dirac_from_partials(d)
    pi_phi = (K / c) * np.conj(Psi)
    pi_phiplus = (K / c) * Psi
    spatial = np.einsum("jmn,...jn->...m", ETA[1:], d[..., 1:, :])  # d_j eta^j Phi
    H = ((c**2 / K) * bilinear(np.conj(pi_phi), ETA0, pi_phiplus)
         - c * bilinear(np.conj(pi_phi), ETA0, spatial)
         - c * bilinear(spatial, ETA0, pi_phiplus)
         + K * kappa**2 * bilinear(Phi, ETA0, Phi))
    return np.real(H)


def klein_gordon_residual(phi: FieldSampler, kappa: float, x, h: float = 1e-3) -> np.ndarray:
    """``(d_a d^a + kappa^2) phi``."""
    return dalembertian(phi, x, h) + kappa**2 * phi(x)


def canonical_check(phi: FieldSampler, kappa: float, K: float, x, h: float = 1e-3,
                    c: float = 1.0) -> dict:
    """Residuals of the canonical equations and of Klein-Gordon for a trial field.

    Returns max-abs residuals keyed by equation, plus the momenta themselves.
    """
    Phi = phi(x)
    d = partials(phi, x, h)
    dd = second_partials(phi, x, h)
    Psi = dirac_from_partials(d)
    dPsi = np.einsum("bmn,...abn->...am", ETA, dd)       # d_a Psi
    pi_phiplus = (K / c) * Psi
    pi_phi = (K / c) * np.conj(Psi)
    d_pi_phiplus = (K / c) * dPsi
    e0ej = np.einsum("mk,jkn->jmn", ETA0, ETA[1:])         # eta^0 eta^j

    spatial_phi = np.einsum("jmn,...jn->...m", e0ej, d[..., 1:, :])
    spatial_psi = np.einsum("jmn,...jn->...m", e0ej, dPsi[..., 1:, :])
    spatial_phi_row = np.einsum("...jn,jnm->...m", np.conj(d[..., 1:, :]), e0ej)
    spatial_psi_row = np.einsum("...jn,jnm->...m", np.conj(dPsi[..., 1:, :]), e0ej)

    res = {
        "phi_dot": d[..., 0, :] - (c / K) * pi_phiplus @ ETA0.T + spatial_phi,
        "phi_dot_adjoint": np.conj(d[..., 0, :]) - (c / K) * pi_phi @ ETA0 + spatial_phi_row,
        "pi_phiplus_dot": c * d_pi_phiplus[..., 0, :] + K * kappa**2 * Phi @ ETA0.T + K * spatial_psi,
        "pi_phi_dot": c * np.conj(d_pi_phiplus[..., 0, :]) + K * kappa**2 * bar(Phi) + K * spatial_psi_row,
        "klein_gordon": klein_gordon_residual(phi, kappa, x, h),
    }
    report = {name: float(np.max(np.abs(v), initial=0.0)) for name, v in res.items()}
    report["pi_phi"] = pi_phi
    report["pi_phiplus"] = pi_phiplus
    return report


CANONICAL_KEYS = ("phi_dot", "phi_dot_adjoint", "pi_phiplus_dot", "pi_phi_dot", "klein_gordon")


def family_residual(phi: FieldSampler, kappa: float, x, h: float = 1e-3) -> np.ndarray:
    """``(D - kappa N) phi``."""
    return dirac_op(phi, x, h) - kappa * phi(x) @ N_MAT.T
