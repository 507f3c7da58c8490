"""Spacetime field samplers and their partial derivatives.

A sampler maps points ``x`` of shape ``(..., 4)`` holding ``(x0, x, y, z)`` to
field values of shape ``(..., n)``.  Analytic fields may also carry exact first
(``grad``, shape ``(..., 4, n)``) and second (``hess``, shape ``(..., 4, 4, n)``)
partial derivatives with respect to the contravariant coordinates; everything
else falls back on 4th-order central differences.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .algebra import METRIC

ArrayFn = Callable[[np.ndarray], np.ndarray]


class DomainError(ValueError):
    """A sampler produced non-finite values on a finite-difference stencil."""


@dataclass(frozen=True)
class FieldSampler:
    value: ArrayFn
    grad: Optional[ArrayFn] = None
    hess: Optional[ArrayFn] = None

    def __call__(self, x) -> np.ndarray:
        return self.value(np.asarray(x, dtype=float))

    def map(self, matrix) -> "FieldSampler":
        """Sampler for ``matrix @ field`` (constant matrix), derivatives included."""
        M = np.asarray(matrix)

        def lift(fn):
            if fn is None:
                return None
            return lambda x: fn(x) @ M.T

        return FieldSampler(lift(self.value), lift(self.grad), lift(self.hess))


def default_step(kappa: float) -> float:
    return 1e-3 / abs(kappa) if kappa else 1e-3


def _fd(fn: ArrayFn, x: np.ndarray, h: float) -> np.ndarray:
    """4th-order central first derivatives of ``fn``; the new axis sits before the field axes."""
    x = np.asarray(x, dtype=float)
    out = []
    for al in range(4):
        e = np.zeros(4)
        e[al] = h
        vals = [fn(x + 2 * e), fn(x + e), fn(x - e), fn(x - 2 * e)]
        for v in vals:
            if not np.all(np.isfinite(v)):
                raise DomainError(f"non-finite field value on stencil around {x.tolist()} (h={h})")
        out.append((-vals[0] + 8 * vals[1] - 8 * vals[2] + vals[3]) / (12 * h))
    stacked = np.stack(out)
    # move the derivative axis to just after the batch axes of x
    batch = x.ndim - 1
    return np.moveaxis(stacked, 0, batch)


def partials(sampler: FieldSampler, x, h: float) -> np.ndarray:
    """Covariant derivatives ``d_alpha field`` with shape ``(..., 4, n)``."""
    x = np.asarray(x, dtype=float)
    if sampler.grad is not None:
        return sampler.grad(x)
    return _fd(sampler.value, x, h)


def second_partials(sampler: FieldSampler, x, h: float) -> np.ndarray:
    """``d_alpha d_beta field`` with shape ``(..., 4, 4, n)``."""
    x = np.asarray(x, dtype=float)
    if sampler.hess is not None:
        return sampler.hess(x)
    if sampler.grad is not None:
        return _fd(sampler.grad, x, h)
    return _fd(lambda y: _fd(sampler.value, y, h), x, h)


def raise_index(d: np.ndarray) -> np.ndarray:
    """Turn ``d_alpha`` into ``d^alpha`` along the derivative axis ``-2``."""
    return d * METRIC[:, None]


def dalembertian(sampler: FieldSampler, x, h: float) -> np.ndarray:
    """``d_alpha d^alpha field``."""
    H = second_partials(sampler, x, h)
    diag = np.diagonal(H, axis1=-3, axis2=-2)  # (..., n, 4)
    return np.tensordot(diag, METRIC, axes=([-1], [0]))


def constant(value) -> FieldSampler:
    v = np.asarray(value)

    def val(x):
        return np.broadcast_to(v, np.shape(x)[:-1] + v.shape).copy()

    def grad(x):
        return np.zeros(np.shape(x)[:-1] + (4,) + v.shape, dtype=v.dtype)

    def hess(x):
        return np.zeros(np.shape(x)[:-1] + (4, 4) + v.shape, dtype=v.dtype)

    return FieldSampler(val, grad, hess)


def random_harmonic_field(n_components: int = 8, n_modes: int = 4, seed: int = 0,
                          scale: float = 1.0) -> FieldSampler:
    """Seeded real superposition of cosines with random (not on-shell) wave vectors.

    Generic draws satisfy no field equation, which makes this a negative control.
    """
    rng = np.random.default_rng(seed)
    k = rng.normal(scale=scale, size=(n_modes, 4))
    amp = rng.normal(size=(n_modes, n_components))
    ph = rng.uniform(0, 2 * np.pi, n_modes)

    def arg(x):
        return np.asarray(x, dtype=float) @ k.T + ph  # (..., modes)

    def value(x):
        return np.cos(arg(x)) @ amp

    def grad(x):
        return np.einsum("...m,ma,mn->...an", -np.sin(arg(x)), k, amp)

    def hess(x):
        return np.einsum("...m,ma,mb,mn->...abn", -np.cos(arg(x)), k, k, amp)

    return FieldSampler(value, grad, hess)
