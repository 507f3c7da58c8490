import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from realdirac.free_field import PlaneWaveParams, plane_wave_dirac, plane_wave_phi
from realdirac.interaction import CouplingParams
from realdirac.lattice import (
    CFLError, EvolutionError, EvolveConfig, Grid1D, LatticeState, StaticPotential, d_dz,
    evolve, evolve_dirac4, mass_rotation_check, measured_phase_velocity, plane_wave_state,
    read_snapshot, rk4_step, time_derivative, write_snapshot,
)
from realdirac.representations import to_dirac


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid1D(8, 0.1)
    g = Grid1D.periodic(2 * np.pi, 64)
    assert g.box_L == pytest.approx(2 * np.pi)


def test_state_must_be_real():
    with pytest.raises(TypeError):
        LatticeState(0.0, np.zeros((16, 8), dtype=complex))


def test_stencil_is_fourth_order():
    errs = []
    for n in (32, 64):
        g = Grid1D.periodic(2 * np.pi, n)
        f = np.sin(3 * g.z)[:, None]
        errs.append(np.abs(d_dz(f, g.dz)[:, 0] - 3 * np.cos(3 * g.z)).max())
    assert np.log2(errs[0] / errs[1]) > 3.8


def test_time_derivative_matches_analytic():
    p = PlaneWaveParams.from_mode(1.0, 1)
    errs = []
    for n in (64, 128):
        g = Grid1D.periodic(p.box_L, n)
        s = plane_wave_state(p, g, 0.4)
        x = np.zeros((n, 4))
        x[:, 0], x[:, 3] = 0.4, g.z
        exact = plane_wave_phi(p).grad(x)[:, 0, :]
        errs.append(np.abs(time_derivative(s, g, 1.0) - exact).max())
    assert np.log2(errs[0] / errs[1]) > 3.8


def test_uniform_fields():
    g = Grid1D.periodic(1.0, 16)
    phi = np.tile(np.arange(8.0), (16, 1))
    assert np.allclose(time_derivative(LatticeState(0, phi), g, 0.0), 0.0)
    from realdirac.lattice import E0N
    assert np.allclose(time_derivative(LatticeState(0, phi), g, 2.0), 2.0 * phi @ E0N.T)


def test_zero_initial_data_stays_zero():
    g = Grid1D.periodic(2 * np.pi, 32)
    tr = evolve(LatticeState(0.0, np.zeros((32, 8))), g, EvolveConfig(0.01, 50), 1.0)
    assert not tr.final.phi.any()


def test_cfl_refused():
    g = Grid1D.periodic(2 * np.pi, 32)
    with pytest.raises(CFLError):
        evolve(LatticeState(0.0, np.zeros((32, 8))), g, EvolveConfig(g.dz, 1), 1.0)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_nan_aborts_with_step():
    g = Grid1D.periodic(2 * np.pi, 16)
    phi = np.zeros((16, 8))
    phi[3, 2] = 1e308
    with pytest.raises(EvolutionError) as err:
        evolve(LatticeState(0.0, phi), g, EvolveConfig(0.1, 100), 1.0)
    assert err.value.step >= 1


def test_mass_rotation_period_and_half():
    full = mass_rotation_check(1.0, 2 * np.pi / 2000, 2000)
    assert full["max_abs_error"] < 1e-8
    assert np.allclose(full["final"], full["exact"], atol=1e-8)
    half = mass_rotation_check(1.0, np.pi / 1000, 1000)
    assert half["max_abs_error"] < 1e-8 and half["spatially_uniform"]
    still = mass_rotation_check(0.0, 0.1, 10)
    assert still["max_abs_error"] < 1e-14


def test_half_period_flips_sign():
    rng = np.random.default_rng(0)
    phi0 = np.tile(rng.normal(size=8), (16, 1))
    g = Grid1D.periodic(2 * np.pi, 16)
    tr = evolve(LatticeState(0.0, phi0), g, EvolveConfig(np.pi / 1000, 1000), 1.0)
    assert np.abs(tr.final.phi + phi0).max() < 1e-8


def test_short_run_monitors_and_convergence():
    p = PlaneWaveParams.from_mode(1.0, 1)
    out = []
    for n in (32, 64):
        g = Grid1D.periodic(p.box_L, n)
        T = 2 * np.pi / p.k0
        steps = int(np.ceil(T / (g.dz / 4)))
        tr = evolve(plane_wave_state(p, g), g, EvolveConfig(T / steps, steps, sample_every=10), 1.0, reference=p)
        assert max(tr.max_imag) == 0.0
        assert tr.Q[0] == pytest.approx(1.0, rel=1e-12)
        assert tr.S3[0] == pytest.approx(0.5, rel=1e-12)
        out.append(tr.max_abs_err[-1])
    assert out[0] / out[1] > 12


def test_phase_velocity():
    p = PlaneWaveParams.from_mode(1.0, 1)
    g = Grid1D.periodic(p.box_L, 64)
    tr = evolve(plane_wave_state(p, g), g, EvolveConfig(g.dz / 4, 1000, sample_every=50), 1.0, reference=p)
    assert measured_phase_velocity(tr, p) == pytest.approx(p.k0 / p.k, rel=1e-4)


def test_evolution_commutes_with_s_transform():
    p = PlaneWaveParams.from_mode(1.0, 2)
    g = Grid1D.periodic(p.box_L, 64)
    dt, n = g.dz / 4, 200
    real = evolve(plane_wave_state(p, g), g, EvolveConfig(dt, n), 1.0).final.phi
    four = evolve_dirac4(to_dirac(plane_wave_state(p, g).phi).phi_a, g, 1.0, dt, n)
    assert np.abs(to_dirac(real).phi_a - four).max() < 1e-12
    rng = np.random.default_rng(4)
    rnd = rng.normal(size=(64, 8))
    real = evolve(LatticeState(0.0, rnd), g, EvolveConfig(dt, 50), 1.0).final.phi
    four = evolve_dirac4(to_dirac(rnd).phi_a, g, 1.0, dt, 50)
    assert np.abs(to_dirac(real).phi_a - four).max() < 1e-12


def test_static_potential_and_singular_grid():
    g = Grid1D.periodic(2 * np.pi, 32)
    par = CouplingParams(-0.3, 1.0, 1.0)
    A = np.zeros((32, 4))
    A[:, 0] = 0.5
    s = LatticeState(0.0, np.random.default_rng(1).normal(size=(32, 8)))
    tr = evolve(s, g, EvolveConfig(0.01, 20), 1.0, potential=StaticPotential(A, par))
    assert np.isrealobj(tr.final.phi)
    A[5, 0] = 1 / 0.3
    with pytest.raises(ValueError, match="singular"):
        time_derivative(s, g, 1.0, StaticPotential(A, par))


@given(arrays(float, (16, 8), elements=st.floats(-1e3, 1e3, allow_nan=False)))
def test_snapshot_roundtrip(tmp_path_factory, phi):
    path = tmp_path_factory.mktemp("snap") / "a.rdf"
    write_snapshot(path, phi)
    raw = path.read_bytes()
    assert raw[:4] == b"RDF1"
    assert int.from_bytes(raw[4:8], "little") == 16
    assert raw[8:16] == bytes(8)
    assert len(raw) == 16 + 16 * 8 * 8
    assert np.array_equal(read_snapshot(path), phi)


def test_snapshot_rejects_garbage(tmp_path):
    p = tmp_path / "bad.rdf"
    p.write_bytes(b"XXXX" + bytes(12))
    with pytest.raises(ValueError):
        read_snapshot(p)


@given(st.floats(0.01, 1.0))
def test_rk4_exact_for_cubic(dt):
    # y' = 3 t^2 written autonomously as (t, y)
    def f(v):
        return np.array([1.0, 3 * v[0] ** 2])

    out = rk4_step(f, np.array([0.0, 0.0]), dt)
    assert out[1] == pytest.approx(dt**3, rel=1e-12)
