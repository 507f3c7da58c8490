"""Dirac-Coulomb ground state as a solution of the interacting real field equation.

Lengths are in units of ``1/kappa`` unless stated otherwise; "Bohr units" mean
multiples of ``1/(Z alpha kappa)``.  The Coulomb field is ``A^0 = Z |e| / r``
with electron coupling ``e = -sqrt(alpha)`` and ``K = kappa``, so the potential
energy seen by the field is ``kappa (e/K) A^0 = -Z alpha / r``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.optimize import brentq
from scipy.special import gamma as gamma_fn

from .conserved import Quadrature
from .free_field import N_MAT
from .interaction import CouplingParams
from .representations import from_dirac
from .sampling import FieldSampler, partials, raise_index

ALPHA_FS = 1 / 137.035999


@dataclass(frozen=True)
class RadialGroundState:
    """Radial functions normalized so that ``integral (g^2 + f^2) r^2 dr = 1``."""

    g: Callable[[np.ndarray], np.ndarray]
    f: Callable[[np.ndarray], np.ndarray]
    k0: float
    Z: float
    alpha_fs: float
    kappa: float
    gamma: float = field(default=np.nan)

    @property
    def coupling(self) -> float:
        return self.Z * self.alpha_fs

    @property
    def bohr(self) -> float:
        """Length scale ``1/(Z alpha kappa)``."""
        return 1.0 / (self.coupling * self.kappa)

    @property
    def norm_integral(self) -> float:
        """``integral (g^2 + f^2) d^3x`` (= 4 pi by construction)."""
        return 4 * np.pi

    def coupling_params(self) -> CouplingParams:
        return CouplingParams(e=-np.sqrt(self.alpha_fs), K=self.kappa, kappa=self.kappa)


def _check_coupling(Z: float, alpha_fs: float) -> float:
    za = Z * alpha_fs
    if za <= 0:
        raise ValueError("Z * alpha must be positive")
    if za >= 1:
        raise ValueError(f"Z * alpha = {za:.6g} >= 1: no normalizable ground state (supercritical)")
    return za


def hydrogen_ground_state(Z: float = 1.0, alpha_fs: float = ALPHA_FS, kappa: float = 1.0) -> RadialGroundState:
    """Closed-form ground state: ``k0 = kappa sqrt(1 - (Z alpha)^2)``, ``g ~ r^(gamma-1) e^(-Z alpha kappa r)``."""
    za = _check_coupling(Z, alpha_fs)
    gam = np.sqrt(1 - za**2)
    lam = za * kappa
    ratio = -(1 - gam) / za
    norm = np.sqrt((2 * lam) ** (2 * gam + 1) / (gamma_fn(2 * gam + 1) * (1 + ratio**2)))

    def g(r):
        r = np.asarray(r, dtype=float)
        return norm * r ** (gam - 1) * np.exp(-lam * r)

    def f(r):
        return ratio * g(r)

    return RadialGroundState(g, f, kappa * gam, Z, alpha_fs, kappa, gam)


@dataclass(frozen=True)
class ShootingResult:
    k0: float
    r: np.ndarray
    g: np.ndarray
    f: np.ndarray
    mismatch: float


def _radial_rhs(energy_minus_m, m, zeta):
    """Radial system in ``x = ln r`` for ``G = r g``, ``F = r f`` (j = 1/2, s-wave upper)."""
    e_plus_m = 2 * m + energy_minus_m

    def rhs(x, y):
        r = np.exp(x)
        G, F = y
        return [G + (r * e_plus_m + zeta) * F, -F - (r * energy_minus_m + zeta) * G]

    return rhs


def shoot_ground_state(Z: float = 1.0, alpha_fs: float = ALPHA_FS, kappa: float = 1.0,
                       grid_points: int = 4000, r_min_bohr: float = 1e-6, r_max_bohr: float = 40.0,
                       rtol: float = 1e-12) -> ShootingResult:
    """Find the ground state by outward/inward integration matched at the classical turning point.

    Only the Frobenius exponent at the origin and the decay rate at the outer
    edge are used as boundary data; the energy comes from root-finding the
    log-derivative mismatch.
    """
    zeta = _check_coupling(Z, alpha_fs)
    if grid_points < 4000:
        raise ValueError("grid_points must be at least 4000")
    m = kappa
    bohr = 1 / (zeta * m)
    r_min, r_max = r_min_bohr * bohr, r_max_bohr * bohr
    s = np.sqrt(1 - zeta**2)  # exponent of the regular solution at r -> 0

    def integrate(binding):
        em = -m * binding  # E - m
        energy = m + em
        r_tp = zeta / (m - energy)
        r_tp = min(max(r_tp, 10 * r_min), 0.5 * r_max)
        rhs = _radial_rhs(em, m, zeta)
        y0 = [r_min**s, r_min**s * (s - 1) / zeta]
        out = solve_ivp(rhs, (np.log(r_min), np.log(r_tp)), y0, method="DOP853",
                        rtol=rtol, atol=1e-300, dense_output=True)
        lam = np.sqrt(m**2 - energy**2)
        tail = np.exp(-lam * (r_max - r_tp))
        yN = [tail, -tail * np.sqrt((m - energy) / (m + energy))]
        inn = solve_ivp(rhs, (np.log(r_max), np.log(r_tp)), yN, method="DOP853",
                        rtol=rtol, atol=1e-300, dense_output=True)
        return out, inn, r_tp

    def mismatch(binding):
        out, inn, _ = integrate(binding)
        Go, Fo = out.y[:, -1]
        Gi, Fi = inn.y[:, -1]
        return (Go * Fi - Gi * Fo) / np.hypot(Go, Fo) / np.hypot(Gi, Fi)

    # ground state lies between (Z alpha)^2 / 2 and (Z alpha)^2 in binding / m;
    # the first excited level binds with about (Z alpha)^2 / 8
    lo, hi = 0.3 * zeta**2, 1.0 * zeta**2
    binding = brentq(mismatch, lo, hi, xtol=1e-15 * zeta**2, rtol=4 * np.finfo(float).eps, maxiter=200)
    out, inn, r_tp = integrate(binding)

    x = np.linspace(np.log(r_min), np.log(r_max), grid_points)
    left = x <= np.log(r_tp)
    y = np.empty((2, grid_points))
    y[:, left] = out.sol(x[left])
    y[:, ~left] = inn.sol(x[~left])
    # join the two branches continuously in G
    Go = out.sol(np.log(r_tp))[0]
    Gi = inn.sol(np.log(r_tp))[0]
    y[:, ~left] *= Go / Gi
    r = np.exp(x)
    norm = simpson((y[0] ** 2 + y[1] ** 2) * r, x=x)
    y /= np.sqrt(norm)
    return ShootingResult(m * (1 - binding), r, y[0] / r, y[1] / r, float(mismatch(binding)))


# ----------------------------------------------------------- field assembly


def _spherical(x):
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x[..., 1:], axis=-1)
    cos_t = np.divide(x[..., 3], r, out=np.ones_like(r), where=r > 0)
    sin_t = np.sqrt(np.clip(1 - cos_t**2, 0.0, None))
    ph = np.arctan2(x[..., 2], x[..., 1])
    return r, cos_t, sin_t, ph


def hydrogen_spinor(state: RadialGroundState) -> FieldSampler:
    """Four-component ground state ``[g y00 (1,0); i f (-sqrt(1/3) y10, sqrt(2/3) y11)] e^{-i k0 x0}``.

    Spherical harmonics carry the Condon-Shortley phase,
    ``y11 = -sqrt(3/8pi) sin(theta) e^{i phi}``.
    """
    def value(x):
        x = np.asarray(x, dtype=float)
        r, ct, st, ph = _spherical(x)
        g, f = state.g(r), state.f(r)
        y00 = 1 / np.sqrt(4 * np.pi)
        y10 = np.sqrt(3 / (4 * np.pi)) * ct
        y11 = -np.sqrt(3 / (8 * np.pi)) * st * np.exp(1j * ph)
        time = np.exp(-1j * state.k0 * x[..., 0])
        comps = [g * y00, np.zeros_like(g), 1j * f * (-np.sqrt(1 / 3) * y10), 1j * f * np.sqrt(2 / 3) * y11]
        return np.stack(comps, axis=-1) * time[..., None]

    return FieldSampler(value)


def hydrogen_phi(state: RadialGroundState) -> FieldSampler:
    """Real eight-component field obtained from :func:`hydrogen_spinor` via ``S^+``."""
    spinor = hydrogen_spinor(state)
    return FieldSampler(lambda x: from_dirac(spinor(x)))


def hydrogen_phi_table(state: RadialGroundState, x, condon_shortley: bool = True) -> np.ndarray:
    """Closed-form real components, written out term by term.

    Same field as :func:`hydrogen_phi`; used as a cross-check of the assembly.
    ``condon_shortley=False`` drops the phase of ``y11``, which flips the sign
    of the last two rows; that variant does not solve the field equation.
    """
    x = np.asarray(x, dtype=float)
    r, ct, st, ph = _spherical(x)
    g, f = state.g(r), state.f(r)
    c, s = np.cos(state.k0 * x[..., 0]), np.sin(state.k0 * x[..., 0])
    z = np.zeros_like(g)
    comps = [
        -g * c, -g * s, z, z,
        f * ct * c, f * ct * s,
        -f * st * (np.cos(ph) * c + np.sin(ph) * s),
        -f * st * (np.sin(ph) * c - np.cos(ph) * s),
    ]
    if not condon_shortley:
        comps[6], comps[7] = -comps[6], -comps[7]
    return np.stack(comps, axis=-1) / np.sqrt(2 * np.pi)


def coulomb_potential(Z: float = 1.0, alpha_fs: float = ALPHA_FS) -> FieldSampler:
    """``A^alpha = (Z |e| / r, 0, 0, 0)`` with ``|e| = sqrt(alpha)``."""
    strength = Z * np.sqrt(alpha_fs)

    def value(x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x[..., 1:], axis=-1)
        out = np.zeros(x.shape)
        out[..., 0] = strength / r
        return out

    return FieldSampler(value)


def singular_radius(Z: float, alpha_fs: float, K: float) -> float:
    """Radius where ``(e/K)^2 A_b A^b = 1`` for the Coulomb field."""
    return Z * alpha_fs / K


# ------------------------------------------------------------- integrals


def spherical_quadrature(r_min: float, r_max: float, n_panels: int = 48, n_radial: int = 16,
                         n_theta: int = 8, n_phi: int = 8) -> Quadrature:
    """Composite Gauss-Legendre in r on geometric panels, Gauss-Legendre in cos(theta), midpoints in phi."""
    if not 0 <= r_min < r_max:
        raise ValueError("need 0 <= r_min < r_max")
    if r_min > 0:
        edges = np.geomspace(r_min, r_max, n_panels + 1)
    else:
        edges = np.concatenate([[0.0], np.geomspace(r_max * 1e-8, r_max, n_panels)])
    u, wu = np.polynomial.legendre.leggauss(n_radial)
    lo, hi = edges[:-1, None], edges[1:, None]
    r = (0.5 * (hi - lo) * u + 0.5 * (hi + lo)).ravel()
    wr = (0.5 * (hi - lo) * wu).ravel() * r**2
    ct, wt = np.polynomial.legendre.leggauss(n_theta)
    ph = (np.arange(n_phi) + 0.5) * 2 * np.pi / n_phi
    wp = np.full(n_phi, 2 * np.pi / n_phi)
    R, CT, PH = np.meshgrid(r, ct, ph, indexing="ij")
    W = np.einsum("i,j,k->ijk", wr, wt, wp)
    ST = np.sqrt(1 - CT**2)
    pts = np.stack([R * ST * np.cos(PH), R * ST * np.sin(PH), R * CT], axis=-1).reshape(-1, 3)
    return Quadrature(pts, W.ravel())


def hydrogen_conserved(state: RadialGroundState, t: float = 0.0, r_max_bohr: float = 60.0,
                       h: float | None = None) -> dict:
    """Charge and energy after fixing the normalization with the radial norm integral.

    ``const_Q (kappa^2/pi) norm = 1`` and ``const_P (kappa^2/pi) norm = 1/c``.
    The small ball inside twice the singular radius is left out of the
    integrals; its share of the charge integral is reported.
    """
    kappa = state.kappa
    K = kappa
    h = 1e-3 / kappa if h is None else h
    phi = hydrogen_phi(state)
    norm = state.norm_integral
    const_Q = np.pi / (kappa**2 * norm)
    const_P = np.pi / (kappa**2 * norm)
    r_excl = 2 * singular_radius(state.Z, state.alpha_fs, K)
    quad = spherical_quadrature(r_excl, r_max_bohr * state.bohr)
    inner = spherical_quadrature(0.0, r_excl, n_panels=8)

    def q_density(points):
        v = phi(points)
        return 2 * kappa**2 * np.sum(v * v, axis=-1)

    x = quad.at(t)
    Q = const_Q * quad.integrate(q_density(x))
    excluded = const_Q * inner.integrate(q_density(inner.at(t)))
    dN = raise_index(partials(phi, x, h)) @ N_MAT.T
    p_dens = np.einsum("...n,...an->...a", phi(x), dN)
    P = const_P * (-2 * kappa * K) * quad.integrate(p_dens)
    raw_norm = quad.integrate(state.g(np.linalg.norm(quad.points, axis=-1)) ** 2
                              + state.f(np.linalg.norm(quad.points, axis=-1)) ** 2)
    return {
        "Q": float(Q),
        "P": np.asarray(P, dtype=float),
        "P0": float(P[0]),
        "k0": state.k0,
        "const_Q": const_Q,
        "const_P": const_P,
        "norm_integral": norm,
        "norm_integral_quadrature": float(raw_norm),
        "excluded_radius": r_excl,
        "excluded_charge": float(excluded),
    }


def hydrogen_sample_points(state: RadialGroundState, n: int = 200, r_range=(0.05, 20.0),
                           t_max: float = 10.0, seed: int = 0) -> np.ndarray:
    """Random events with radii drawn uniformly in ``r_range`` (Bohr units)."""
    rng = np.random.default_rng(seed)
    r = rng.uniform(*r_range, n) * state.bohr
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1)[:, None]
    return np.concatenate([rng.uniform(0, t_max, (n, 1)), r[:, None] * d], axis=1)


def hydrogen_residuals(state: RadialGroundState, x=None, h: float = 1e-3) -> dict:
    """Interacting-equation residual maxima divided by the largest spinor amplitude on ``x``."""
    from .interaction import interacting_residual

    x = hydrogen_sample_points(state) if x is None else np.asarray(x, dtype=float)
    res = interacting_residual(hydrogen_phi(state), coulomb_potential(state.Z, state.alpha_fs),
                               state.coupling_params(), x, h)
    scale = float(np.max(np.abs(hydrogen_spinor(state)(x))))
    return {k: v / scale for k, v in res.items() if k.endswith("_max")} | {"scale": scale}
