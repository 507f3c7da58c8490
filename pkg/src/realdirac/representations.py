"""Conversions between the real field, the complex combinations and Dirac spinor pairs.

All functions act on the last axis, so grids of shape ``(..., 8)`` work as-is.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .algebra import n_b, n_matrix, s_matrix

REALITY_TOL = 1e-10


class RealityError(ValueError):
    """Raised when a field that must be real carries an imaginary part."""

    def __init__(self, residual: float, tol: float):
        self.residual = residual
        self.tol = tol
        super().__init__(f"reality violated: max imaginary residue {residual:.3e} exceeds {tol:.1e}")


class DiracPair(NamedTuple):
    phi_a: np.ndarray
    phi_b: np.ndarray


_S = s_matrix()
_S_DAG = _S.conj().T
_NB = n_b().astype(float)
_N = n_matrix().astype(float)


def _require_kappa(kappa: float) -> None:
    if kappa == 0:
        raise ValueError("kappa must be nonzero")


def compose_psi12(phi, psi, kappa: float) -> tuple[np.ndarray, np.ndarray]:
    """``(kappa*phi + i*psi, kappa*phi - i*psi)``."""
    _require_kappa(kappa)
    phi = np.asarray(phi)
    psi = np.asarray(psi)
    return kappa * phi + 1j * psi, kappa * phi - 1j * psi


def decompose_psi12(psi1, psi2, kappa: float, tol: float = REALITY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Invert :func:`compose_psi12`; requires ``psi2 == conj(psi1)`` to within ``tol``."""
    _require_kappa(kappa)
    psi1 = np.asarray(psi1, dtype=complex)
    psi2 = np.asarray(psi2, dtype=complex)
    mismatch = float(np.max(np.abs(psi2 - psi1.conj()), initial=0.0))
    phi = (psi1 + psi2) / (2 * kappa)
    psi = (psi1 - psi2) / 2j
    residual = max(mismatch, float(np.max(np.abs(phi.imag), initial=0.0)),
                   float(np.max(np.abs(psi.imag), initial=0.0)))
    if residual > tol:
        raise RealityError(residual, tol)
    return phi.real.copy(), psi.real.copy()


def to_dirac(phi) -> DiracPair:
    """Split ``S @ phi`` into its two four-component halves."""
    out = np.asarray(phi) @ _S.T
    return DiracPair(out[..., :4], out[..., 4:])


def from_dirac(phi_a, tol: float = 1e-12) -> np.ndarray:
    """Real field ``S^+ [phi_a; N_b conj(phi_a)]``."""
    phi_a = np.asarray(phi_a, dtype=complex)
    full = np.concatenate([phi_a, phi_a.conj() @ _NB.T], axis=-1)
    out = full @ _S_DAG.T
    scale = max(1.0, float(np.max(np.abs(phi_a), initial=0.0)))
    residual = float(np.max(np.abs(out.imag), initial=0.0))
    if residual > tol * scale:
        raise RealityError(residual, tol * scale)
    return out.real.copy()


def pair_constraint_residual(pair: DiracPair) -> float:
    """max |phi_b - N_b conj(phi_a)|; zero for pairs coming from a real field."""
    diff = pair.phi_b - np.asarray(pair.phi_a).conj() @ _NB.T
    return float(np.max(np.abs(diff), initial=0.0))


def family_psi(phi, kappa: float) -> np.ndarray:
    """``kappa * N @ phi``, the partner field of the family solutions."""
    return kappa * (np.asarray(phi) @ _N.T)
