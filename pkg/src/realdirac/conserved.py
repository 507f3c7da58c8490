"""Charge, energy-momentum and spin-projection functionals of the real Dirac field.

Integrals are weighted sums over a :class:`Quadrature` (spatial nodes at a fixed
time).  For fields that only vary along z, :func:`box_quadrature` integrates
along z with midpoints and folds the two transverse directions in as ``L^2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .free_field import ETA, N_MAT, PlaneWaveParams, bilinear
from .sampling import FieldSampler, partials, raise_index

E1E2 = ETA[1] @ ETA[2]
E1E2_DAGGERS = ETA[1].T @ ETA[2].T
MIN_POINTS_PER_WAVELENGTH = 16


@dataclass(frozen=True)
class Quadrature:
    points: np.ndarray   # (M, 3) spatial nodes
    weights: np.ndarray  # (M,)

    def at(self, t: float) -> np.ndarray:
        t_col = np.full((len(self.points), 1), float(t))
        return np.hstack([t_col, self.points])

    def integrate(self, values) -> float | np.ndarray:
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))

    @property
    def volume(self) -> float:
        return float(self.weights.sum())


def box_quadrature(box_L: float, n: int, transverse: bool = True) -> Quadrature:
    """Midpoint rule along z on ``[0, L)``; transverse directions contribute ``L^2``."""
    if n < 1 or box_L <= 0:
        raise ValueError("need n >= 1 and box_L > 0")
    dz = box_L / n
    z = (np.arange(n) + 0.5) * dz
    pts = np.zeros((n, 3))
    pts[:, 2] = z
    w = np.full(n, dz * (box_L**2 if transverse else 1.0))
    return Quadrature(pts, w)


def plane_wave_quadrature(params: PlaneWaveParams, n: int | None = None) -> Quadrature:
    """Box quadrature for a plane wave, refusing boxes that do not hold whole wavelengths."""
    if not params.is_commensurate():
        raise ValueError(
            f"k L / 2pi = {params.mode:.6g} is not an integer; the periodic box would alias the wave"
        )
    waves = max(1, abs(int(round(params.mode))))
    n_min = MIN_POINTS_PER_WAVELENGTH * waves
    if n is None:
        n = max(64, n_min)
    elif n < n_min:
        raise ValueError(f"n = {n} is below {MIN_POINTS_PER_WAVELENGTH} points per wavelength ({n_min})")
    return box_quadrature(params.box_L, n)


@dataclass(frozen=True)
class NormalizationLedger:
    const_Q: float
    const_P: float
    const_M: float
    K: float
    kappa: float
    box_L: float
    c: float = 1.0
    hbar: float = 1.0
    notes: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "const_Q": self.const_Q, "const_P": self.const_P, "const_M": self.const_M,
            "K": self.K, "kappa": self.kappa, "box_L": self.box_L,
            "c": self.c, "hbar": self.hbar, "notes": list(self.notes),
        }


UNIT_LEDGER_NOTE = (
    "K = hbar*c*kappa is inferred, not given: only this choice turns the normalized "
    "plane-wave momentum into hbar*k and the spin projection into hbar/2"
)


def select_normalization(kappa: float, box_L: float, c: float = 1.0, hbar: float = 1.0,
                         K: float | None = None) -> NormalizationLedger:
    """Constants making the plane wave in an ``L^3`` box carry unit charge.

    ``const_Q 4 kappa^2 L^3 = 1`` and ``const_P = const_M = 1 / (4 kappa^2 L^3 c)``.
    ``K`` defaults to ``hbar c kappa``.
    """
    if kappa <= 0 or box_L <= 0:
        raise ValueError("kappa and box_L must be positive")
    vol = 4 * kappa**2 * box_L**3
    K = hbar * c * kappa if K is None else K
    return NormalizationLedger(1 / vol, 1 / (vol * c), 1 / (vol * c), K, kappa, box_L, c, hbar,
                               (UNIT_LEDGER_NOTE,))


def unit_ledger(K: float, kappa: float, box_L: float = 1.0) -> NormalizationLedger:
    """All normalization constants equal to 1 (raw integrals)."""
    return NormalizationLedger(1.0, 1.0, 1.0, K, kappa, box_L)


@dataclass(frozen=True)
class ConservedSet:
    Q: float
    P: np.ndarray
    S3: float

    def to_json(self) -> dict:
        return {"Q": float(self.Q), **{f"P{i}": float(self.P[i]) for i in range(4)}, "S3": float(self.S3)}


# ----------------------------------------------------------------- functionals


def continuity_residual(psi1: FieldSampler, x, h: float = 1e-3) -> np.ndarray:
    """Divergence ``d_a (Psi1^+ eta^0 eta^a Psi1)`` of the conserved current."""
    v = psi1(x)
    d = partials(psi1, x, h)
    e0e = np.einsum("mk,akn->amn", ETA[0], ETA)
    term = np.einsum("...an,amn,...m->...", np.conj(d), np.swapaxes(e0e, 1, 2), v)
    total = term + np.einsum("...m,amn,...an->...", np.conj(v), e0e, d)
    return np.real(total)


def charge_from_psi1(psi1: FieldSampler, quad: Quadrature, t: float = 0.0, const_Q: float = 1.0) -> float:
    """``const_Q * integral Psi1^+ Psi1``."""
    v = psi1(quad.at(t))
    return float(const_Q * quad.integrate(np.sum(np.abs(v) ** 2, axis=-1)))


def charge(phi: FieldSampler, psi: FieldSampler, kappa: float, quad: Quadrature,
           t: float = 0.0, const_Q: float = 1.0) -> float:
    """``const_Q * integral (kappa^2 Phi^+ Phi + Psi^+ Psi)``."""
    x = quad.at(t)
    a, b = phi(x), psi(x)
    dens = kappa**2 * np.sum(np.abs(a) ** 2, axis=-1) + np.sum(np.abs(b) ** 2, axis=-1)
    return float(const_Q * quad.integrate(dens))


def charge_family(phi: FieldSampler, kappa: float, quad: Quadrature, t: float = 0.0,
                  const_Q: float = 1.0) -> float:
    """Family shortcut ``const_Q * integral 2 kappa^2 Phi^+ Phi``."""
    v = phi(quad.at(t))
    return float(const_Q * quad.integrate(2 * kappa**2 * np.sum(np.abs(v) ** 2, axis=-1)))


def momentum(phi: FieldSampler, psi: FieldSampler, K: float, quad: Quadrature, t: float = 0.0,
             const_P: float = 1.0, h: float = 1e-3) -> np.ndarray:
    """``const_P K integral (Psi^+ d^a Phi - Phi^+ d^a Psi)``."""
    x = quad.at(t)
    a, b = phi(x), psi(x)
    da = raise_index(partials(phi, x, h))
    db = raise_index(partials(psi, x, h))
    dens = (np.einsum("...n,...an->...a", np.conj(b), da)
            - np.einsum("...n,...an->...a", np.conj(a), db))
    return np.real(const_P * K * quad.integrate(dens))


def momentum_family(phi: FieldSampler, kappa: float, K: float, quad: Quadrature, t: float = 0.0,
                    const_P: float = 1.0, h: float = 1e-3) -> np.ndarray:
    """Family shortcut ``const_P (-2 kappa K) integral Phi^+ d^a (N Phi)``."""
    x = quad.at(t)
    a = phi(x)
    dN = raise_index(partials(phi, x, h)) @ N_MAT.T
    dens = np.einsum("...n,...an->...a", np.conj(a), dN)
    return np.real(const_P * (-2 * kappa * K) * quad.integrate(dens))


def spin_s3(phi: FieldSampler, psi: FieldSampler, K: float, quad: Quadrature, t: float = 0.0,
            const_M: float = 1.0) -> float:
    """``const_M (K/2) integral (Psi^+ eta^1 eta^2 Phi - Phi^+ eta^1+ eta^2+ Psi)``."""
    x = quad.at(t)
    a, b = phi(x), psi(x)
    dens = bilinear(b, E1E2, a) - bilinear(a, E1E2_DAGGERS, b)
    return float(np.real(const_M * 0.5 * K * quad.integrate(dens)))


def spin_s3_family(phi: FieldSampler, kappa: float, K: float, quad: Quadrature, t: float = 0.0,
                   const_M: float = 1.0, with_n: bool = True) -> float:
    """Family shortcut for S3.

    ``with_n=True`` evaluates ``-kappa K integral Phi^+ eta^1 eta^2 N Phi``, which
    is what the general functional reduces to when ``Psi = kappa N Phi``.
    ``with_n=False`` drops ``N``; for a real field the integrand is then
    identically zero because ``eta^1 eta^2`` is antisymmetric.
    """
    v = phi(quad.at(t))
    M = E1E2 @ N_MAT if with_n else E1E2
    sign = -1.0 if with_n else 1.0
    return float(np.real(const_M * sign * kappa * K * quad.integrate(bilinear(v, M, v))))


def conserved_set(phi: FieldSampler, psi: FieldSampler, kappa: float, quad: Quadrature,
                  ledger: NormalizationLedger, t: float = 0.0, h: float = 1e-3) -> ConservedSet:
    """General-form Q, P^a, S3 using the ledger's constants and ``K``."""
    return ConservedSet(
        charge(phi, psi, kappa, quad, t, ledger.const_Q),
        momentum(phi, psi, ledger.K, quad, t, ledger.const_P, h),
        spin_s3(phi, psi, ledger.K, quad, t, ledger.const_M),
    )


def conserved_set_family(phi: FieldSampler, kappa: float, quad: Quadrature,
                         ledger: NormalizationLedger, t: float = 0.0, h: float = 1e-3) -> ConservedSet:
    return ConservedSet(
        charge_family(phi, kappa, quad, t, ledger.const_Q),
        momentum_family(phi, kappa, ledger.K, quad, t, ledger.const_P, h),
        spin_s3_family(phi, kappa, ledger.K, quad, t, ledger.const_M),
    )


def plane_wave_targets(params: PlaneWaveParams, K: float) -> dict:
    """Closed-form unnormalized integrals for the plane wave in an ``L^3`` box."""
    v = 4 * params.kappa**2 * params.box_L**3
    k_up = np.array([params.k0, 0.0, 0.0, params.k])
    return {"Q": v, "P": v * (K / params.kappa) * k_up, "S3": v * K / (2 * params.kappa)}


def plane_wave_conserved(params: PlaneWaveParams, K: float | None = None, n: int | None = None,
                         hbar: float = 1.0, c: float = 1.0) -> dict:
    """General-form and family-form Q, P, S3 for the plane wave, raw and normalized.

    The normalization constants always come from :func:`select_normalization`
    with the default ``K = hbar c kappa``; passing another ``K`` changes the
    functionals but not the constants, so the unit targets are then missed.
    """
    from .free_field import plane_wave_phi

    quad = plane_wave_quadrature(params, n)
    kappa = params.kappa
    ledger = select_normalization(kappa, params.box_L, c, hbar)
    K = ledger.K if K is None else float(K)
    if K <= 0:
        raise ValueError("K must be positive")
    phi = plane_wave_phi(params)
    psi = phi.map(kappa * N_MAT)
    raw = unit_ledger(K, kappa, params.box_L)
    general_raw = conserved_set(phi, psi, kappa, quad, raw)
    family_raw = conserved_set_family(phi, kappa, quad, raw)
    scale = np.array([ledger.const_Q, ledger.const_P, ledger.const_M])

    def normalized(s: ConservedSet) -> ConservedSet:
        return ConservedSet(s.Q * scale[0], s.P * scale[1], s.S3 * scale[2])

    k_up = np.array([params.k0, 0.0, 0.0, params.k])
    unit = ConservedSet(1.0, hbar * k_up, hbar / 2)
    general = normalized(general_raw)
    family = normalized(family_raw)

    def dev(a: ConservedSet, b: ConservedSet) -> float:
        return float(max(abs(a.Q - b.Q), np.max(np.abs(a.P - b.P)), abs(a.S3 - b.S3)))

    closed = plane_wave_targets(params, K)
    raw_dev = max(
        abs(general_raw.Q / closed["Q"] - 1),
        float(np.max(np.abs(general_raw.P - closed["P"]))) / float(np.max(np.abs(closed["P"]))),
        abs(general_raw.S3 / closed["S3"] - 1),
    )
    return {
        "K": K,
        "ledger": ledger,
        "general": general,
        "family": family,
        "general_raw": general_raw,
        "family_raw": family_raw,
        "closed_form_raw": closed,
        "raw_relative_deviation": float(raw_dev),
        "target": unit,
        "max_deviation": max(dev(general, unit), dev(family, unit)),
        "family_vs_general": dev(general, family),
    }
