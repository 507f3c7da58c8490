"""Time evolution of the real first-order system on a periodic 1D lattice along z.

The update solves ``eta^0 d_0 Phi = kappa (1 + a) N Phi - eta^3 d_3 Phi`` with
classical RK4 and a 4th-order central stencil for ``d_3``.  Every matrix in
the right-hand side is real, so the state never acquires an imaginary part.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .algebra import gammas
from .conserved import NormalizationLedger, select_normalization
from .free_field import ETA, N_MAT, PlaneWaveParams, plane_wave_phi
from .interaction import CouplingParams, a_op, a_scalar
from .representations import to_dirac

MAX_CFL = 0.5
SNAPSHOT_MAGIC = b"RDF1"

E0 = ETA[0]
E0N = E0 @ N_MAT
E0E3 = E0 @ ETA[3]
E1E2N = ETA[1] @ ETA[2] @ N_MAT


class CFLError(ValueError):
    pass


class EvolutionError(RuntimeError):
    def __init__(self, step: int, msg: str = "non-finite values in the state"):
        self.step = step
        super().__init__(f"step {step}: {msg}")


@dataclass(frozen=True)
class Grid1D:
    n_z: int
    dz: float

    def __post_init__(self):
        if self.n_z < 16:
            raise ValueError("n_z must be at least 16")
        if self.dz <= 0:
            raise ValueError("dz must be positive")

    @property
    def box_L(self) -> float:
        return self.n_z * self.dz

    @property
    def z(self) -> np.ndarray:
        return np.arange(self.n_z) * self.dz

    @classmethod
    def periodic(cls, box_L: float, n_z: int) -> "Grid1D":
        return cls(n_z, box_L / n_z)


@dataclass
class LatticeState:
    t: float
    phi: np.ndarray  # (n_z, 8), real

    def __post_init__(self):
        self.phi = np.asarray(self.phi)
        if np.iscomplexobj(self.phi):
            raise TypeError("lattice state must be real")
        if self.phi.ndim != 2 or self.phi.shape[1] != 8:
            raise ValueError("phi must have shape (n_z, 8)")


@dataclass(frozen=True)
class EvolveConfig:
    dt: float
    n_steps: int
    scheme: str = "rk4"
    sample_every: int = 1

    def cfl(self, grid: Grid1D) -> float:
        return self.dt / grid.dz


@dataclass(frozen=True)
class StaticPotential:
    """Time-independent ``A^alpha(z)`` sampled on the grid, shape ``(n_z, 4)``."""

    A: np.ndarray
    params: CouplingParams


def d_dz(f: np.ndarray, dz: float) -> np.ndarray:
    """4th-order periodic central difference along axis 0."""
    return (-np.roll(f, -2, 0) + 8 * np.roll(f, -1, 0) - 8 * np.roll(f, 1, 0) + np.roll(f, 2, 0)) / (12 * dz)


def _mass_matrices(grid: Grid1D, kappa: float, potential: Optional[StaticPotential]) -> np.ndarray:
    """``kappa eta^0 (1 + a(z)) N`` per grid point, or a single 8x8 when ``A`` is absent."""
    if potential is None:
        return kappa * E0N
    p = potential.params
    s = 1.0 - a_scalar(potential.A, p.e, p.K)
    if np.any(np.abs(s) <= 1e-12):
        raise ValueError("the singular shell (e/K)^2 A.A = 1 intersects the grid")
    a = a_op(potential.A, p.e, p.K)
    return kappa * np.einsum("mk,zkl,ln->zmn", E0, np.eye(8) + a, N_MAT)


def time_derivative(state: LatticeState, grid: Grid1D, kappa: float,
                    potential: Optional[StaticPotential] = None) -> np.ndarray:
    """``d_0 Phi = eta^0 (kappa (1 + a) N Phi - eta^3 d_3 Phi)``."""
    return _rhs(_mass_matrices(grid, kappa, potential), grid.dz)(state.phi)


def _rhs(mass: np.ndarray, dz: float) -> Callable[[np.ndarray], np.ndarray]:
    if mass.ndim == 2:
        def f(phi):
            return phi @ mass.T - d_dz(phi, dz) @ E0E3.T
    else:
        def f(phi):
            return np.einsum("zmn,zn->zm", mass, phi) - d_dz(phi, dz) @ E0E3.T
    return f


def rk4_step(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


# ------------------------------------------------------------------ monitors


def lattice_charge(phi: np.ndarray, grid: Grid1D, kappa: float, ledger: NormalizationLedger) -> float:
    """``const_Q * integral 2 kappa^2 Phi^+ Phi``, transverse area ``L^2``."""
    return float(ledger.const_Q * 2 * kappa**2 * np.sum(phi * phi) * grid.dz * grid.box_L**2)


def lattice_p3(phi: np.ndarray, grid: Grid1D, kappa: float, ledger: NormalizationLedger) -> float:
    """``const_P (-2 kappa K) integral Phi^+ d^3 (N Phi)`` with ``d^3 = -d_3``."""
    dN = -d_dz(phi, grid.dz) @ N_MAT.T
    return float(ledger.const_P * (-2 * kappa * ledger.K) * np.sum(phi * dN) * grid.dz * grid.box_L**2)


def lattice_s3(phi: np.ndarray, grid: Grid1D, kappa: float, ledger: NormalizationLedger) -> float:
    """``const_M (-kappa K) integral Phi^+ eta^1 eta^2 N Phi``."""
    val = np.sum(phi * (phi @ E1E2N.T))
    return float(ledger.const_M * (-kappa * ledger.K) * val * grid.dz * grid.box_L**2)


def plane_wave_state(params: PlaneWaveParams, grid: Grid1D, t: float = 0.0) -> LatticeState:
    x = np.zeros((grid.n_z, 4))
    x[:, 0] = t
    x[:, 3] = grid.z
    return LatticeState(t, plane_wave_phi(params)(x))


def phase_error(phi: np.ndarray, reference: np.ndarray) -> float:
    """Phase of the numerical positive-frequency spinor relative to the reference one."""
    num = to_dirac(phi).phi_a
    ref = to_dirac(reference).phi_a
    return float(np.angle(np.sum(np.conj(ref) * num)))


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    Q: list = field(default_factory=list)
    P3: list = field(default_factory=list)
    S3: list = field(default_factory=list)
    max_imag: list = field(default_factory=list)
    phase_err: list = field(default_factory=list)
    max_abs_err: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    final: Optional[LatticeState] = None

    def rows(self):
        for i, t in enumerate(self.times):
            yield {
                "t": t, "Q": self.Q[i], "P3": self.P3[i], "S3": self.S3[i],
                "phase_err": self.phase_err[i] if self.phase_err else float("nan"),
                "max_abs_err": self.max_abs_err[i] if self.max_abs_err else float("nan"),
            }

    @property
    def q_drift(self) -> float:
        q = np.asarray(self.Q)
        return float(np.max(np.abs(q - q[0])) / abs(q[0])) if q[0] else float(np.max(np.abs(q)))


def evolve(state: LatticeState, grid: Grid1D, config: EvolveConfig, kappa: float,
           potential: Optional[StaticPotential] = None, reference: Optional[PlaneWaveParams] = None,
           ledger: Optional[NormalizationLedger] = None, keep_snapshots: bool = False) -> Trajectory:
    """Integrate with RK4, recording monitors every ``config.sample_every`` steps.

    With ``reference`` the analytic plane wave is compared against the lattice
    state (phase and pointwise error).
    """
    if config.scheme != "rk4":
        raise ValueError(f"unknown scheme {config.scheme!r}")
    if state.phi.shape[0] != grid.n_z:
        raise ValueError("state does not match the grid")
    cfl = config.cfl(grid)
    if cfl > MAX_CFL:
        raise CFLError(f"dt/dz = {cfl:.4g} exceeds {MAX_CFL}")
    if config.n_steps < 0 or config.sample_every < 1:
        raise ValueError("n_steps must be >= 0 and sample_every >= 1")
    if reference is not None and not reference.is_commensurate():
        raise ValueError("reference plane wave does not fit the periodic box")
    if ledger is None:
        ledger = select_normalization(kappa, grid.box_L) if kappa > 0 else None

    f = _rhs(_mass_matrices(grid, kappa, potential), grid.dz)
    traj = Trajectory()
    phi = state.phi.astype(float, copy=True)
    t0 = state.t

    def record(step, phi):
        t = t0 + step * config.dt
        traj.times.append(t)
        if ledger is not None:
            traj.Q.append(lattice_charge(phi, grid, kappa, ledger))
            traj.P3.append(lattice_p3(phi, grid, kappa, ledger))
            traj.S3.append(lattice_s3(phi, grid, kappa, ledger))
        else:
            traj.Q.append(float(np.sum(phi * phi) * grid.dz))
            traj.P3.append(float("nan"))
            traj.S3.append(float("nan"))
        traj.max_imag.append(0.0 if np.isrealobj(phi) else float(np.max(np.abs(np.imag(phi)))))
        if reference is not None:
            exact = plane_wave_state(reference, grid, t).phi
            traj.phase_err.append(phase_error(phi, exact))
            traj.max_abs_err.append(float(np.max(np.abs(phi - exact))))
        if keep_snapshots:
            traj.snapshots.append(LatticeState(t, phi.copy()))

    record(0, phi)
    for step in range(1, config.n_steps + 1):
        phi = rk4_step(f, phi, config.dt)
        if not np.all(np.isfinite(phi)):
            raise EvolutionError(step)
        if step % config.sample_every == 0 or step == config.n_steps:
            record(step, phi)
    traj.final = LatticeState(t0 + config.n_steps * config.dt, phi)
    return traj


def measured_phase_velocity(traj: Trajectory, params: PlaneWaveParams) -> float:
    """Fit the accumulated phase error linearly in time and convert to ``omega / k``."""
    t = np.asarray(traj.times)
    ph = np.unwrap(np.asarray(traj.phase_err))
    slope = np.polyfit(t - t[0], ph, 1)[0]
    # numerical spinor ~ exact * exp(-i d_omega t)
    omega = params.k0 - slope
    return float(omega / params.k)


# ---------------------------------------------------- four-component mirror

GAMMA = gammas()
G0G3 = GAMMA[0] @ GAMMA[3]


def dirac4_time_derivative(phi_a: np.ndarray, grid: Grid1D, kappa: float) -> np.ndarray:
    """``d_0 phi = -gamma^0 gamma^3 d_3 phi - i kappa gamma^0 phi`` for ``(i gamma.d - kappa) phi = 0``."""
    return -d_dz(phi_a, grid.dz) @ G0G3.T - 1j * kappa * phi_a @ GAMMA[0].T


def evolve_dirac4(phi_a: np.ndarray, grid: Grid1D, kappa: float, dt: float, n_steps: int) -> np.ndarray:
    y = np.asarray(phi_a, dtype=complex)
    for _ in range(n_steps):
        y = rk4_step(lambda v: dirac4_time_derivative(v, grid, kappa), y, dt)
    return y


# ------------------------------------------------------------ mass rotation


def mass_rotation_check(kappa: float, dt: float, n_steps: int, n_z: int = 16, seed: int = 0) -> dict:
    """Evolve a spatially uniform field and compare with ``(cos kt + sin kt eta^0 N) Phi(0)``."""
    rng = np.random.default_rng(seed)
    grid = Grid1D.periodic(2 * np.pi, n_z)
    phi0 = np.tile(rng.normal(size=8), (n_z, 1))
    traj = evolve(LatticeState(0.0, phi0), grid, EvolveConfig(dt, n_steps, sample_every=max(1, n_steps)),
                  kappa, ledger=select_normalization(abs(kappa) or 1.0, grid.box_L))
    T = n_steps * dt
    rot = np.cos(kappa * T) * np.eye(8) + np.sin(kappa * T) * E0N
    exact = phi0 @ rot.T
    err = float(np.max(np.abs(traj.final.phi - exact)))
    return {"t": T, "max_abs_error": err, "final": traj.final.phi, "exact": exact,
            "spatially_uniform": bool(np.allclose(traj.final.phi, traj.final.phi[0]))}


# ---------------------------------------------------------------- snapshots


def write_snapshot(path, phi: np.ndarray) -> None:
    """Binary snapshot: 16-byte header (``RDF1``, uint32 n_z, 8 reserved bytes) then float64 LE rows."""
    phi = np.ascontiguousarray(phi, dtype="<f8")
    if phi.ndim != 2 or phi.shape[1] != 8:
        raise ValueError("snapshot expects shape (n_z, 8)")
    header = SNAPSHOT_MAGIC + struct.pack("<I", phi.shape[0]) + bytes(8)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(phi.tobytes(order="C"))


def read_snapshot(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:4] != SNAPSHOT_MAGIC:
        raise ValueError("not an RDF1 snapshot")
    (n_z,) = struct.unpack("<I", data[4:8])
    body = np.frombuffer(data[16:], dtype="<f8")
    if body.size != n_z * 8:
        raise ValueError(f"snapshot body holds {body.size} values, expected {n_z * 8}")
    return body.reshape(n_z, 8).astype(float)
