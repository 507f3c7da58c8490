"""Matrices of the real eight-component Dirac formalism.

The real matrices ``eta``, ``N`` (and the 4x4 blocks ``a^i``, ``N_a``, ``N_b``)
are built as integer arrays so that the Clifford identities can be checked in
exact arithmetic.  The unitary ``S`` and the Dirac-Pauli ``gamma`` matrices are
complex floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

METRIC = np.array([1, -1, -1, -1])
METRIC.setflags(write=False)

FLOAT_TOL = 1e-15

_A1 = [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]]
_A2 = [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]
_A3 = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]

_NA = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]
_NB = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]

# rows of sqrt(2) * S
_S_TEMPLATE = [
    [-1, 1j, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, -1j, 0, 0, 0, 0],
    [0, 0, 0, 0, -1j, -1, 0, 0],
    [0, 0, 0, 0, 0, 0, 1j, -1],
    [0, 0, -1, -1j, 0, 0, 0, 0],
    [-1, -1j, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, -1j, -1],
    [0, 0, 0, 0, -1j, 1, 0, 0],
]

_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _check_index(alpha: int) -> int:
    if isinstance(alpha, bool) or int(alpha) != alpha or not 0 <= alpha <= 3:
        raise IndexError(f"spacetime index must be 0, 1, 2 or 3, got {alpha!r}")
    return int(alpha)


def a_block(i: int) -> np.ndarray:
    """Return the 4x4 integer block ``a^i`` (i = 1, 2, 3)."""
    if i not in (1, 2, 3):
        raise IndexError(f"a^i is defined for i = 1, 2, 3, got {i!r}")
    return np.array((_A1, _A2, _A3)[i - 1], dtype=np.int64)


def eta(alpha: int) -> np.ndarray:
    """Return the real 8x8 matrix ``eta^alpha`` as an integer array.

    ``eta^0 = diag(1_4, -1_4)`` and ``eta^i = [[0, a^i], [-a^i^T, 0]]``.
    """
    alpha = _check_index(alpha)
    out = np.zeros((8, 8), dtype=np.int64)
    if alpha == 0:
        out[:4, :4] = np.eye(4, dtype=np.int64)
        out[4:, 4:] = -np.eye(4, dtype=np.int64)
    else:
        a = a_block(alpha)
        out[:4, 4:] = a
        out[4:, :4] = -a.T
    return out


def etas() -> np.ndarray:
    """All four ``eta`` matrices stacked, shape (4, 8, 8)."""
    return np.stack([eta(al) for al in range(4)])


def gamma(alpha: int) -> np.ndarray:
    """Dirac-Pauli gamma matrix: ``gamma^0 = diag(1,1,-1,-1)``, ``gamma^i = [[0, s_i], [-s_i, 0]]``."""
    alpha = _check_index(alpha)
    out = np.zeros((4, 4), dtype=complex)
    if alpha == 0:
        out[:] = np.diag([1, 1, -1, -1])
    else:
        s = _SIGMA[alpha - 1]
        out[:2, 2:] = s
        out[2:, :2] = -s
    return out


def gammas() -> np.ndarray:
    return np.stack([gamma(al) for al in range(4)])


def n_a() -> np.ndarray:
    return np.array(_NA, dtype=np.int64)


def n_b() -> np.ndarray:
    return np.array(_NB, dtype=np.int64)


def n_matrix() -> np.ndarray:
    """Block-diagonal ``N = diag(N_a, N_b)``; real, ``N^2 = -1``, commutes with every eta."""
    out = np.zeros((8, 8), dtype=np.int64)
    out[:4, :4] = n_a()
    out[4:, 4:] = n_b()
    return out


def s_matrix() -> np.ndarray:
    """The unitary 8x8 matrix mapping the real system onto two 4-component Dirac systems."""
    return np.array(_S_TEMPLATE, dtype=complex) / np.sqrt(2.0)


def slash(vec, mats: np.ndarray) -> np.ndarray:
    """Contract ``vec_beta mats^beta`` over the last axis of ``vec`` (lower index given)."""
    vec = np.asarray(vec)
    return np.tensordot(vec, mats, axes=([-1], [0]))


def lower(vec) -> np.ndarray:
    """Lower (or raise) a 4-vector index with the metric (+, -, -, -)."""
    return np.asarray(vec) * METRIC


def block_diag(upper: np.ndarray, lower_: np.ndarray) -> np.ndarray:
    n = upper.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=np.result_type(upper, lower_))
    out[:n, :n] = upper
    out[n:, n:] = lower_
    return out


@dataclass(frozen=True)
class IdentityCheck:
    identity_name: str
    max_abs_deviation: float
    passed: bool

    def to_json(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def _dev(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def verify_algebra(eta_mats=None, n_mat=None, s_mat=None, tol: float = FLOAT_TOL) -> list[IdentityCheck]:
    """Check every matrix identity the formalism relies on.

    Optional arguments replace the built-in matrices, which is how negative
    controls (tampered entries) are exercised.  Integer inputs are checked
    exactly: any nonzero deviation fails regardless of ``tol``.
    """
    E = etas() if eta_mats is None else np.asarray(eta_mats)
    N = n_matrix() if n_mat is None else np.asarray(n_mat)
    S = s_matrix() if s_mat is None else np.asarray(s_mat)
    G = gammas()
    Nb = N[4:, 4:]
    I8 = np.eye(8, dtype=np.int64)

    def limit(*arrays):
        exact = all(np.issubdtype(np.asarray(a).dtype, np.integer) for a in arrays)
        return 0.0 if exact else tol

    checks: list[IdentityCheck] = []

    def add(name, deviation, *inputs):
        dev = _dev(deviation)
        checks.append(IdentityCheck(name, dev, dev <= limit(*inputs)))

    for al in range(4):
        for be in range(4):
            anti = E[al] @ E[be] + E[be] @ E[al] - 2 * int(al == be) * METRIC[al] * I8
            add(f"clifford_anticommutator[{al},{be}]", anti, E)

    add("n_antihermitian", N.T.conj() + N, N)
    add("n_squared_minus_one", N @ N + I8, N)
    add("n_commutes_with_eta", np.stack([N @ E[al] - E[al] @ N for al in range(4)]), N, E)

    add("s_unitary", S @ S.conj().T - np.eye(8), S)

    for be in range(4):
        if be == 2:
            add("nb_anticommutes_gamma[2]", Nb @ G[2] + G[2] @ Nb, Nb)
        else:
            add(f"nb_commutes_gamma[{be}]", Nb @ G[be] - G[be] @ Nb, Nb)

    conj_eta = np.stack(
        [S @ E[al] @ S.conj().T - block_diag(G[al], G[al]) for al in range(4)]
    )
    add("s_eta_sdag_equals_gamma_pair", conj_eta, S)
    target_n = block_diag(-1j * np.eye(4), 1j * np.eye(4))
    add("s_n_sdag_equals_minus_i_plus_i", S @ N @ S.conj().T - target_n, S)
    return checks


def report_passed(report: list[IdentityCheck]) -> bool:
    return all(c.passed for c in report)
