"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""
import time

import numpy as np
import pytest

from realdirac.algebra import verify_algebra
from realdirac.cli import run
from realdirac.conserved import plane_wave_conserved
from realdirac.free_field import (
    PlaneWaveParams, dirac_op, family_residual, klein_gordon_residual, maxwell_assemble,
    maxwell_residual, plane_wave_phi, vacuum_wave_potentials,
)
from realdirac.hydrogen import (
    ALPHA_FS, hydrogen_conserved, hydrogen_ground_state, hydrogen_residuals, shoot_ground_state,
)
from realdirac.interaction import CouplingParams, f1_f2_identities, lagrangian_density_int, linearized_lagrangian
from realdirac.lattice import EvolveConfig, Grid1D, evolve, plane_wave_state
from realdirac.sampling import FieldSampler, random_harmonic_field


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {number}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
        assert ok, detail
    return emit


def test_criterion_1_algebra(report):
    t0 = time.perf_counter()
    checks = verify_algebra()
    elapsed = time.perf_counter() - t0
    worst = max(c.max_abs_deviation for c in checks)
    ok = all(c.passed for c in checks) and worst < 1e-15 and elapsed < 1.0
    report(1, "algebra identities", ok, f"{len(checks)} identities, max deviation {worst:.2e}, {elapsed:.3f} s")


def test_criterion_2_plane_wave_residuals(report):
    rng = np.random.default_rng(2)
    worst_res, worst_norm = 0.0, 0.0
    for kappa, k in ((1.0, 1.0), (2.0, 6.0), (0.7, -2.5)):
        p = PlaneWaveParams(kappa, k)
        phi = plane_wave_phi(p)
        x = rng.uniform(-10, 10, (100, 4))
        worst_res = max(worst_res, np.abs(family_residual(phi, kappa, x)).max(),
                        np.abs(klein_gordon_residual(phi, kappa, x)).max())
        v = phi(x)
        worst_norm = max(worst_norm, np.abs(np.sum(v * v, axis=1) - 2.0).max())
    ok = worst_res < 1e-12 and worst_norm < 1e-12
    report(2, "plane-wave residuals", ok, f"max residual {worst_res:.2e}, max |norm2 - 2| {worst_norm:.2e}")


def test_criterion_3_unnormalized_integrals(report):
    devs = []
    for kappa, mode, L in ((1.0, 1, 2 * np.pi), (2.0, 3, np.pi)):
        for K in (kappa, 0.37):
            devs.append(plane_wave_conserved(PlaneWaveParams.from_mode(kappa, mode, L), K=K)["raw_relative_deviation"])
    worst = max(devs)
    report(3, "box integrals vs closed form", worst < 1e-10, f"max relative deviation {worst:.2e}")


def test_criterion_4_normalized_state_and_k_control(report):
    devs = [plane_wave_conserved(PlaneWaveParams.from_mode(k, m, L))["max_deviation"]
            for k, m, L in ((1.0, 1, 2 * np.pi), (2.0, 3, np.pi))]
    control = plane_wave_conserved(PlaneWaveParams.from_mode(1.0, 1), K=2.0)["max_deviation"]
    ok = max(devs) < 1e-10 and control > 1e-3
    report(4, "Q = 1, P = k, S3 = 1/2 with K = kappa", ok,
           f"max deviation {max(devs):.2e}; K = 2 kappa control deviation {control:.3f} (must fail)")


def test_criterion_5_maxwell(report):
    rng = np.random.default_rng(5)
    x = rng.uniform(0, 2 * np.pi, (100, 4))
    worst_r, worst_a = 0.0, 0.0
    for direction, pol, omega in (((0, 0, 1), (1, 0, 0), 1.0), ((1, 2, 0.5), (0, 0, 1), 2.3)):
        em = vacuum_wave_potentials(direction, pol, omega)
        r1, r2 = maxwell_residual(em, x)
        worst_r = max(worst_r, np.abs(r1).max(), np.abs(r2).max())
        worst_a = max(worst_a, np.abs(maxwell_assemble(em, x) - dirac_op(em.phi_column(), x)).max())
    ok = worst_r < 1e-10 and worst_a < 1e-10
    report(5, "vacuum wave in eight-component form", ok, f"residual {worst_r:.2e}, assembly mismatch {worst_a:.2e}")


def test_criterion_6_interaction_construction(report):
    rng = np.random.default_rng(6)
    ident = {"f1_times_one_plus_a": 0.0, "f2_minus_f1_inverse": 0.0}
    # physical coupling, then order-one coupling with values close to the singular shell
    for e, K, spread in ((-np.sqrt(ALPHA_FS), 1.0, 3.0), (-1.0, 1.0, 0.7)):
        A = rng.normal(scale=spread, size=(1000, 4))
        s = 1 - (e / K) ** 2 * (A[:, 0] ** 2 - np.sum(A[:, 1:] ** 2, axis=1))
        assert np.all(np.abs(s) > 1e-6)
        for key, val in f1_f2_identities(A, e, K).items():
            if key in ident:
                ident[key] = max(ident[key], val)
    params = CouplingParams(e=-0.3, K=1.0, kappa=1.0)
    phi = random_harmonic_field(seed=6, scale=0.5)
    x = rng.uniform(0, 2 * np.pi, (50, 4))
    A0, M = rng.normal(size=4) * 0.3, rng.normal(size=(4, 4)) * 0.1
    errs = []
    for eps in (1e-2, 5e-3, 2.5e-3):
        pot = FieldSampler(lambda y, eps=eps: eps * (A0 + np.asarray(y) @ M.T))
        errs.append(np.abs(lagrangian_density_int(phi, pot, params, x) - linearized_lagrangian(phi, pot, params, x)).max())
    order = float(np.min(np.log2(np.array(errs[:-1]) / np.array(errs[1:]))))
    ok = ident["f1_times_one_plus_a"] < 1e-12 and ident["f2_minus_f1_inverse"] < 1e-12 and order >= 1.9
    report(6, "F1, F2 identities and linearization", ok,
           f"F1(1+a)-1 {ident['f1_times_one_plus_a']:.2e}, F2-F1^-1 {ident['f2_minus_f1_inverse']:.2e}, "
           f"Richardson order {order:.3f}")


def test_criterion_7_hydrogen(report):
    t0 = time.perf_counter()
    state = hydrogen_ground_state(1.0, ALPHA_FS, 1.0)
    shot = shoot_ground_state(1.0, ALPHA_FS, 1.0)
    cons = hydrogen_conserved(state)
    res = hydrogen_residuals(state)
    elapsed = time.perf_counter() - t0
    dk = abs(shot.k0 - np.sqrt(1 - ALPHA_FS**2))
    dq, dp = abs(cons["Q"] - 1), abs(cons["P0"] - state.k0)
    ok = dk < 1e-8 and dq < 1e-8 and dp < 1e-8 and res["complex4_form_max"] < 1e-8 and elapsed < 10
    report(7, "Dirac-Coulomb ground state", ok,
           f"|k0 shoot - analytic| {dk:.2e}, |Q-1| {dq:.2e}, |P0-k0| {dp:.2e}, "
           f"four-component residual {res['complex4_form_max']:.2e}, {elapsed:.2f} s")


def _ten_periods(nz):
    p = PlaneWaveParams.from_mode(1.0, 1)
    g = Grid1D.periodic(p.box_L, nz)
    T = 10 * 2 * np.pi / p.k0
    n = int(np.ceil(T / (g.dz / 4)))
    t0 = time.perf_counter()
    tr = evolve(plane_wave_state(p, g), g, EvolveConfig(T / n, n, sample_every=10), 1.0, reference=p)
    return tr.q_drift, tr.max_abs_err[-1], time.perf_counter() - t0


def test_criterion_8_evolution(report):
    drift, err, elapsed = _ten_periods(128)
    drift2, err2, _ = _ten_periods(256)
    ok = drift < 1e-8 and err < 1e-5 and drift / drift2 >= 12 and err / err2 >= 12 and elapsed < 30
    report(8, "lattice evolution, 10 periods at n_z = 128", ok,
           f"Q drift {drift:.2e}, error {err:.2e}, refinement gains {drift / drift2:.1f}x / {err / err2:.1f}x, "
           f"{elapsed:.2f} s")


def test_criterion_9_negative_controls(report, capsys):
    codes = {
        "tampered eta": run(["verify-algebra", "--tamper-eta", "2", "1", "6", "--out", "-"]),
        "dispersion-violating wave": run(["planewave", "--k0", "1.2", "--format", "json"]),
        "random non-solution": run(["interaction-check", "--field", "random", "--n-points", "50",
                                    "--n-potentials", "100"]),
        "non-vacuum potential": run(["maxwell-check", "--field", "sin-t"]),
    }
    capsys.readouterr()
    ok = all(c == 1 for c in codes.values())
    report(9, "negative controls flagged", ok, ", ".join(f"{k} -> exit {v}" for k, v in codes.items()))
