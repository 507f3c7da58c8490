"""Command-line entry point: ``realdirac <subcommand> [options]``.

Exit codes: 0 when every check is within tolerance, 1 when a verification
fails (the failing item is named on stderr), 2 on usage or parameter errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import algebra, conserved, free_field, hydrogen, interaction, lattice, representations
from .sampling import constant, random_harmonic_field

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ALPHA_DEFAULT = hydrogen.ALPHA_FS
TWO_PI = 2 * math.pi


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ output


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps_json(obj) -> str:
    # repr-based floats round-trip exactly (>= 15 significant digits where needed)
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False, ensure_ascii=False) + "\n"


def fmt(v) -> str:
    return format(float(v), ".16e")


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _finish(payload: dict, args, csv_out=None) -> int:
    """Write JSON (or CSV for csv-format commands) and map failures to exit 1."""
    if csv_out is not None and getattr(args, "format", "json") == "csv":
        _emit(csv_out, args.out)
        if getattr(args, "summary", None):
            _emit(dumps_json(payload), args.summary)
    else:
        _emit(dumps_json(payload), args.out)
    failed = payload.get("failed", [])
    if failed:
        sys.stderr.write("FAILED: " + ", ".join(failed) + "\n")
        return EXIT_FAIL
    return EXIT_OK


def _gate(payload: dict, checks: dict) -> dict:
    """``checks`` maps a name to ``(value, tolerance)``; failures are listed by name."""
    failed = [name for name, (v, tol) in checks.items() if not (np.isfinite(v) and v <= tol)]
    payload["failed"] = failed
    payload["pass"] = not failed
    return payload


# ------------------------------------------------------------ subcommands


def cmd_verify_algebra(args) -> int:
    E = algebra.etas()
    if args.tamper_eta is not None:
        a, i, j = args.tamper_eta
        if not (0 <= a <= 3 and 0 <= i < 8 and 0 <= j < 8):
            raise UsageError("--tamper-eta expects ALPHA in 0..3 and ROW, COL in 0..7")
        E = E.copy()
        E[a, i, j] += args.delta
    checks = algebra.verify_algebra(eta_mats=E)
    failed = [c.identity_name for c in checks if not c.passed]
    payload = {
        "checks": [c.to_json() for c in checks],
        "n_checks": len(checks),
        "max_abs_deviation": max(c.max_abs_deviation for c in checks),
        "tampered": args.tamper_eta is not None,
        "failed": failed,
        "pass": not failed,
    }
    return _finish(payload, args)


def _plane_params(args) -> free_field.PlaneWaveParams:
    k = args.k if args.k is not None else TWO_PI * args.k_mode / args.L
    return free_field.PlaneWaveParams(args.kappa, k, args.L)


def cmd_planewave(args) -> int:
    params = _plane_params(args)
    k0 = params.k0 if args.k0 is None else args.k0
    phi = free_field.plane_wave_phi(params, k0=args.k0)
    z = np.arange(args.n_points) * params.box_L / args.n_points
    t = np.arange(args.n_times) * (TWO_PI / k0) / args.n_times
    T, Zc = np.meshgrid(t, z, indexing="ij")
    x = np.zeros(T.shape + (4,))
    x[..., 0], x[..., 3] = T, Zc
    x = x.reshape(-1, 4)
    values = phi(x)
    r30 = np.max(np.abs(free_field.family_residual(phi, params.kappa, x)), axis=-1)
    r20 = np.max(np.abs(free_field.klein_gordon_residual(phi, params.kappa, x)), axis=-1)
    resid = np.maximum(r30, r20)
    norm2 = np.sum(values * values, axis=-1)
    scale = max(1.0, k0**2)
    payload = {
        "kappa": params.kappa, "k": params.k, "k0": k0, "k0_dispersion": params.k0,
        "box_L": params.box_L, "n_samples": int(len(x)),
        "family_residual_max": float(r30.max()), "klein_gordon_residual_max": float(r20.max()),
        "residual_max": float(resid.max()),
        "norm2_min": float(norm2.min()), "norm2_max": float(norm2.max()),
    }
    _gate(payload, {
        "family_equation": (payload["family_residual_max"], args.tol * scale),
        "klein_gordon": (payload["klein_gordon_residual_max"], args.tol * scale),
        "norm2": (float(np.max(np.abs(norm2 - 2.0))), args.tol),
    })
    header = ["x0", "z"] + [f"phi{i}" for i in range(1, 9)] + ["residual_max", "norm2"]
    rows = np.column_stack([x[:, 0], x[:, 3], values, resid, norm2])
    return _finish(payload, args, csv_text(header, rows))


def cmd_conserved(args) -> int:
    params = _plane_params(args)
    res = conserved.plane_wave_conserved(params, K=args.K, n=args.n)
    closed = res["closed_form_raw"]
    payload = {
        "kappa": params.kappa, "k": params.k, "k0": params.k0, "box_L": params.box_L, "K": res["K"],
        **res["general"].to_json(),
        "family": res["family"].to_json(),
        "targets": res["target"].to_json(),
        "raw": res["general_raw"].to_json(),
        "closed_form_raw": {"Q": closed["Q"], **{f"P{i}": closed["P"][i] for i in range(4)},
                            "S3": closed["S3"]},
        "raw_relative_deviation": res["raw_relative_deviation"],
        "max_deviation": res["max_deviation"],
        "family_vs_general": res["family_vs_general"],
        "ledger": res["ledger"].to_json(),
    }
    _gate(payload, {
        "normalized_targets": (res["max_deviation"], args.tol),
        "closed_form_integrals": (res["raw_relative_deviation"], args.tol),
    })
    return _finish(payload, args)


def cmd_maxwell_check(args) -> int:
    if args.field == "vacuum-wave":
        em = free_field.vacuum_wave_potentials(direction=(0.0, 0.0, 1.0), polarization=(1.0, 0.0, 0.0),
                                               omega=args.omega)
    else:
        em = free_field.sin_t_potentials()
    rng = np.random.default_rng(args.seed)
    x = rng.uniform(0, TWO_PI, (args.n_points, 4))
    r1, r2 = free_field.maxwell_residual(em, x)
    mismatch = np.abs(free_field.maxwell_assemble(em, x) - free_field.dirac_op(em.phi_column(), x))
    payload = {
        "field": args.field, "n_points": args.n_points, "seed": args.seed,
        "field_equation_residual_max": float(np.abs(r1).max()),
        "dual_equation_residual_max": float(np.abs(r2).max()),
        "assembly_mismatch_max": float(mismatch.max()),
    }
    _gate(payload, {
        "field_equation": (payload["field_equation_residual_max"], args.tol),
        "dual_equation": (payload["dual_equation_residual_max"], args.tol),
        "assembly": (payload["assembly_mismatch_max"], args.tol),
    })
    return _finish(payload, args)


def _random_potentials(n, seed, ratio):
    """Random ``A`` values kept away from the singular shell ``ratio^2 A.A = 1``."""
    rng = np.random.default_rng(seed)
    A = rng.normal(scale=0.5 / abs(ratio), size=(n, 4))
    s = 1 - ratio**2 * (A[:, 0] ** 2 - np.sum(A[:, 1:] ** 2, axis=1))
    return A[np.abs(s) > 1e-3]


def cmd_interaction_check(args) -> int:
    e = -math.sqrt(args.alpha)
    params = interaction.CouplingParams(e=e, K=args.kappa, kappa=args.kappa)
    A_rand = _random_potentials(args.n_potentials, args.seed, params.ratio)
    ident = interaction.f1_f2_identities(A_rand, e, params.K)

    if args.field == "hydrogen":
        state = hydrogen.hydrogen_ground_state(args.Z, args.alpha, args.kappa)
        params = state.coupling_params()
        phi = hydrogen.hydrogen_phi(state)
        A = hydrogen.coulomb_potential(args.Z, args.alpha)
        x = hydrogen.hydrogen_sample_points(state, args.n_points, seed=args.seed)
        scale = float(np.max(np.abs(hydrogen.hydrogen_spinor(state)(x))))
    else:
        rng = np.random.default_rng(args.seed)
        x = rng.uniform(0, TWO_PI, (args.n_points, 4))
        A = constant(np.zeros(4))
        if args.field == "planewave":
            phi = free_field.plane_wave_phi(free_field.PlaneWaveParams.from_mode(args.kappa, args.k_mode, args.L))
        else:
            phi = random_harmonic_field(seed=args.seed)
        scale = float(np.max(np.abs(phi(x))))
    res = interaction.interacting_residual(phi, A, params, x)
    can = interaction.canonical_check_int(phi, A, params, x)
    psi = interaction.family_psi_int(phi, A, params)
    src_full = interaction.em_source(phi, psi, A, params, x)
    src_red = interaction.em_source_family(phi, params, x)
    forms = np.array([res["real_form_max"], res["complex8_form_max"], res["complex4_form_max"]]) / scale
    payload = {
        "field": args.field, "n_points": int(len(x)), "seed": args.seed,
        "residual_scale": scale,
        "real_form_residual": float(forms[0]),
        "complex8_form_residual": float(forms[1]),
        "complex4_form_residual": float(forms[2]),
        "forms_max_ratio": float(forms.max() / forms.min()) if forms.min() > 0 else None,
        "canonical": {f"canonical_{i}": can[f"canonical_{i}"] / scale for i in range(1, 5)},
        "f1_times_one_plus_a": ident["f1_times_one_plus_a"],
        "f2_minus_f1_inverse": ident["f2_minus_f1_inverse"],
        "n_potentials": int(len(A_rand)),
        "source_reduction_max": float(np.max(np.abs(src_full - src_red))),
        "source_scale": float(np.max(np.abs(src_red))),
    }
    _gate(payload, {
        "real_form": (forms[0], args.tol),
        "complex8_form": (forms[1], args.tol),
        "complex4_form": (forms[2], args.tol),
        **{k: (v, args.tol) for k, v in payload["canonical"].items()},
        "f1_inverse": (ident["f1_times_one_plus_a"], 1e-12),
        "f2_inverse": (ident["f2_minus_f1_inverse"], 1e-12),
        "source_reduction": (payload["source_reduction_max"], 1e-9),
    })
    return _finish(payload, args)


def cmd_hydrogen(args) -> int:
    state = hydrogen.hydrogen_ground_state(args.Z, args.alpha, args.kappa)
    shot = hydrogen.shoot_ground_state(args.Z, args.alpha, args.kappa, grid_points=args.grid_points)
    b = state.bohr
    m = (shot.r >= 0.01 * b) & (shot.r <= 20 * b)
    g_ref, f_ref = state.g(shot.r[m]), state.f(shot.r[m])
    dg = float(np.max(np.abs(shot.g[m] - g_ref)) / np.max(np.abs(g_ref)))
    df = float(np.max(np.abs(shot.f[m] - f_ref)) / np.max(np.abs(f_ref)))
    cons = hydrogen.hydrogen_conserved(state)
    resid = hydrogen.hydrogen_residuals(state, hydrogen.hydrogen_sample_points(state, seed=args.seed))
    payload = {
        "Z": args.Z, "alpha_fs": args.alpha, "kappa": args.kappa, "gamma": state.gamma,
        "k0_over_kappa": state.k0 / state.kappa,
        "k0_over_kappa_shooting": shot.k0 / state.kappa,
        "shooting_k0_deviation": abs(shot.k0 - state.k0) / state.kappa,
        "shooting_g_deviation": dg, "shooting_f_deviation": df,
        "Q": cons["Q"], "P0": cons["P0"], "k0": state.k0,
        "norm_integral": cons["norm_integral"],
        "norm_integral_quadrature": cons["norm_integral_quadrature"],
        "const_Q": cons["const_Q"], "const_P": cons["const_P"],
        "excluded_radius": cons["excluded_radius"], "excluded_charge": cons["excluded_charge"],
        "real_form_residual": resid["real_form_max"],
        "complex8_form_residual": resid["complex8_form_max"],
        "complex4_form_residual": resid["complex4_form_max"],
    }
    _gate(payload, {
        "shooting_k0": (payload["shooting_k0_deviation"], 1e-8),
        "shooting_g": (dg, 1e-8), "shooting_f": (df, 1e-8),
        "charge": (abs(cons["Q"] - 1), 1e-8),
        "energy": (abs(cons["P0"] - state.k0), 1e-8),
        "complex4_form": (resid["complex4_form_max"], 1e-8),
    })
    if args.csv:
        rows = np.column_stack([shot.r, state.g(shot.r), state.f(shot.r)])
        _emit(csv_text(["r", "g", "f"], rows), args.csv)
    return _finish(payload, args)


def cmd_evolve(args) -> int:
    params = free_field.PlaneWaveParams.from_mode(args.kappa, args.k_mode, args.L)
    grid = lattice.Grid1D.periodic(params.box_L, args.nz)
    period = TWO_PI / params.k0
    run_time = args.periods * period
    if args.dt is None and args.steps is None:
        # dz/4, shortened so that the run ends exactly after the requested periods
        n = int(math.ceil(run_time / (grid.dz / 4)))
        dt = run_time / n
    else:
        dt = grid.dz / 4 if args.dt is None else args.dt
        n = int(round(run_time / dt)) if args.steps is None else args.steps
    config = lattice.EvolveConfig(dt, n, sample_every=args.sample_every)
    if config.cfl(grid) > lattice.MAX_CFL:
        raise UsageError(f"dt/dz = {config.cfl(grid):.6g} exceeds the CFL limit {lattice.MAX_CFL}")
    keep = args.snapshot_dir is not None
    traj = lattice.evolve(lattice.plane_wave_state(params, grid), grid, config, args.kappa,
                          reference=params, keep_snapshots=keep)
    if keep:
        out = Path(args.snapshot_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
            for i, snap in enumerate(traj.snapshots):
                if i % args.snapshot_every == 0 or i == len(traj.snapshots) - 1:
                    lattice.write_snapshot(out / f"snapshot_{i:06d}.rdf", snap.phi)
        except OSError as exc:
            raise UsageError(f"cannot write snapshots to {out}: {exc}") from exc
    payload = {
        "kappa": args.kappa, "k": params.k, "k0": params.k0, "box_L": params.box_L,
        "nz": args.nz, "dz": grid.dz, "dt": dt, "steps": n, "cfl": config.cfl(grid),
        "t_final": traj.times[-1], "n_samples": len(traj.times),
        "q_drift": traj.q_drift,
        "max_abs_err_final": traj.max_abs_err[-1],
        "max_abs_err": max(traj.max_abs_err),
        "phase_err_final": traj.phase_err[-1],
        "phase_velocity": lattice.measured_phase_velocity(traj, params) if len(traj.times) > 2 else None,
        "phase_velocity_exact": params.k0 / params.k,
        "max_imag": max(traj.max_imag),
    }
    _gate(payload, {"charge_drift": (traj.q_drift, args.q_tol),
                    "pointwise_error": (payload["max_abs_err"], args.err_tol),
                    "reality": (payload["max_imag"], 0.0)})
    header = ["t", "Q", "P3", "S3", "phase_err", "max_abs_err"]
    rows = [[r[h] for h in header] for r in traj.rows()]
    return _finish(payload, args, csv_text(header, rows))


def _floats(text, n, name):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"{name}: {exc}") from exc
    if len(vals) != n:
        raise UsageError(f"{name} expects {n} comma-separated numbers, got {len(vals)}")
    return np.array(vals)


def cmd_transform(args) -> int:
    if args.phi is not None:
        phi = _floats(args.phi, 8, "--phi")
        pair = representations.to_dirac(phi)
        back = representations.from_dirac(pair.phi_a)
        direction = "to-dirac"
    else:
        if args.phi_a_re is None:
            raise UsageError("give --phi or --phi-a-re/--phi-a-im")
        im = np.zeros(4) if args.phi_a_im is None else _floats(args.phi_a_im, 4, "--phi-a-im")
        phi_a = _floats(args.phi_a_re, 4, "--phi-a-re") + 1j * im
        phi = representations.from_dirac(phi_a)
        pair = representations.to_dirac(phi)
        back = phi
        direction = "from-dirac"
    roundtrip = float(np.max(np.abs(back - phi))) if direction == "to-dirac" else \
        float(np.max(np.abs(pair.phi_a - phi_a)))
    payload = {
        "direction": direction,
        "phi": phi,
        "phi_a_re": pair.phi_a.real, "phi_a_im": pair.phi_a.imag,
        "phi_b_re": pair.phi_b.real, "phi_b_im": pair.phi_b.imag,
        "pair_constraint_residual": representations.pair_constraint_residual(pair),
        "roundtrip_error": roundtrip,
    }
    _gate(payload, {"roundtrip": (roundtrip, 1e-12),
                    "pair_constraint": (payload["pair_constraint_residual"], 1e-12)})
    return _finish(payload, args)


# ------------------------------------------------------------------ parser


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _count(minimum):
    def parse(text):
        v = int(text)
        if v < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {text}")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="realdirac", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt_default="json", formats=("json",)):
        sp.add_argument("--out", default="-", help="output path ('-' for stdout)")
        if len(formats) > 1:
            sp.add_argument("--format", choices=formats, default=fmt_default)
            sp.add_argument("--summary", help="also write the JSON summary here (csv format)")

    def wave(sp):
        sp.add_argument("--kappa", type=_positive, default=1.0)
        sp.add_argument("--k", type=float, default=None, help="wave number (overrides --k-mode)")
        sp.add_argument("--k-mode", type=int, default=1, help="whole wavelengths in the box")
        sp.add_argument("--L", type=_positive, default=TWO_PI, help="box length")

    sp = sub.add_parser("verify-algebra", help="check the matrix identities")
    sp.add_argument("--tamper-eta", type=int, nargs=3, metavar=("ALPHA", "ROW", "COL"),
                    help="perturb one entry of eta^ALPHA (negative control)")
    sp.add_argument("--delta", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_verify_algebra)

    sp = sub.add_parser("planewave", help="sample the plane wave with residuals")
    wave(sp)
    sp.add_argument("--k0", type=float, default=None, help="override the frequency (negative control)")
    sp.add_argument("--n-points", type=_count(1), default=64)
    sp.add_argument("--n-times", type=_count(1), default=4)
    sp.add_argument("--tol", type=_positive, default=1e-12)
    common(sp, "csv", ("csv", "json"))
    sp.set_defaults(func=cmd_planewave)

    sp = sub.add_parser("conserved", help="normalized charge, momentum and spin of the plane wave")
    wave(sp)
    sp.add_argument("--K", type=_positive, default=None, help="coupling constant K (default hbar c kappa)")
    sp.add_argument("--n", type=_count(1), default=None, help="quadrature points along z")
    sp.add_argument("--tol", type=_positive, default=1e-10)
    common(sp)
    sp.set_defaults(func=cmd_conserved)

    sp = sub.add_parser("maxwell-check", help="Maxwell system in eight-component form")
    sp.add_argument("--field", choices=("vacuum-wave", "sin-t"), default="vacuum-wave")
    sp.add_argument("--omega", type=_positive, default=1.0)
    sp.add_argument("--n-points", type=_count(1), default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=_positive, default=1e-10)
    common(sp)
    sp.set_defaults(func=cmd_maxwell_check)

    sp = sub.add_parser("interaction-check", help="interacting field equation residuals")
    sp.add_argument("--field", choices=("planewave", "hydrogen", "random"), default="planewave")
    sp.add_argument("--kappa", type=_positive, default=1.0)
    sp.add_argument("--k-mode", type=int, default=1)
    sp.add_argument("--L", type=_positive, default=TWO_PI)
    sp.add_argument("--Z", type=_positive, default=1.0)
    sp.add_argument("--alpha", type=_positive, default=ALPHA_DEFAULT)
    sp.add_argument("--n-points", type=_count(1), default=200)
    sp.add_argument("--n-potentials", type=_count(1), default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=_positive, default=1e-8)
    common(sp)
    sp.set_defaults(func=cmd_interaction_check)

    sp = sub.add_parser("hydrogen", help="Dirac-Coulomb ground state")
    sp.add_argument("--Z", type=_positive, default=1.0)
    sp.add_argument("--alpha", type=_positive, default=ALPHA_DEFAULT)
    sp.add_argument("--kappa", type=_positive, default=1.0)
    sp.add_argument("--grid-points", type=_count(4000), default=4000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--csv", help="write (r, g, f) here")
    common(sp)
    sp.set_defaults(func=cmd_hydrogen)

    sp = sub.add_parser("evolve", help="lattice evolution of the plane wave")
    sp.add_argument("--kappa", type=_positive, default=1.0)
    sp.add_argument("--k-mode", type=int, default=1)
    sp.add_argument("--L", type=_positive, default=TWO_PI)
    sp.add_argument("--nz", type=_count(16), default=128)
    sp.add_argument("--dt", type=_positive, default=None, help="time step (default dz/4)")
    sp.add_argument("--steps", type=_count(0), default=None)
    sp.add_argument("--periods", type=_positive, default=10.0, help="run length when --steps is absent")
    sp.add_argument("--sample-every", type=_count(1), default=1)
    sp.add_argument("--snapshot-dir", default=None)
    sp.add_argument("--snapshot-every", type=_count(1), default=1, help="in units of samples")
    sp.add_argument("--q-tol", type=_positive, default=1e-8)
    sp.add_argument("--err-tol", type=_positive, default=1e-5)
    common(sp, "csv", ("csv", "json"))
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("transform", help="real eight-component <-> four-component spinor")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--phi", help="eight comma-separated real components")
    g.add_argument("--phi-a-re", help="real parts of the four-component spinor")
    sp.add_argument("--phi-a-im", help="imaginary parts of the four-component spinor")
    common(sp)
    sp.set_defaults(func=cmd_transform)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, interaction.SingularCouplingError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except lattice.EvolutionError as exc:
        sys.stderr.write(f"FAILED: evolution: {exc}\n")
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
