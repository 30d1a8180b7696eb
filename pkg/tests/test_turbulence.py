import math

import numpy as np
import pytest

from fracstoch.fields import Field, PeriodicGrid, sample_on_grid
from fracstoch.fractional import FracOrder, TimeGrid, frac_laplacian, mittag_leffler
from fracstoch.rng import NoiseModel
from fracstoch.turbulence import (
    FracFlowParams,
    SolverDivergence,
    SpectrumSpec,
    dissipation_convergence,
    energy_dissipation,
    frac_burgers_solve,
    l2_convergence,
    load_field_binary,
    save_field_binary,
    save_field_csv,
    synth_velocity,
)


def _mode_amp(field, k):
    # coefficient of sin(kx) in the sampled field
    return float(-2.0 * np.fft.rfft(field.values)[k].imag / field.points)


def test_flow_params_validation():
    with pytest.raises(ValueError):
        FracFlowParams(FracOrder(0.5), s=0.0)
    with pytest.raises(ValueError):
        FracFlowParams(FracOrder(0.5), s=1.6)
    with pytest.raises(ValueError):
        FracFlowParams(FracOrder(0.5), nu=0.0)
    with pytest.raises(ValueError):
        FracFlowParams(FracOrder(0.5), sigma_f=-1.0)


def test_synth_velocity_deterministic_and_bounded_modes():
    g = PeriodicGrid(2 * np.pi, 128)
    spec = SpectrumSpec(exponent=4.0, modes=6, seed=3)
    u1 = synth_velocity(spec, g)
    u2 = synth_velocity(spec, g)
    assert np.array_equal(u1.values, u2.values)
    with pytest.raises(ValueError):
        synth_velocity(SpectrumSpec(modes=64, seed=0), g)
    with pytest.raises(ValueError):
        SpectrumSpec(modes=1)


def test_synth_velocity_steep_spectrum_concentrates_energy():
    g = PeriodicGrid(2 * np.pi, 128)
    u = synth_velocity(SpectrumSpec(exponent=8.0, modes=8, seed=5), g)
    p = np.abs(np.fft.rfft(u.values)[1:9]) ** 2
    assert p[0] / p.sum() > 0.9


def test_zero_data_zero_forcing_is_fixed_point():
    g = PeriodicGrid(2 * np.pi, 32)
    z = Field(np.zeros(32), g.spacing)
    fp = FracFlowParams(FracOrder(0.5), s=0.8, nu=0.05)
    traj = frac_burgers_solve(z, fp, TimeGrid(0.0, 1.0, 64))
    assert max(float(np.max(np.abs(f.values))) for f in traj) == 0.0


def test_linear_mode_matches_mittag_leffler():
    g = PeriodicGrid(2 * np.pi, 16)
    u0 = sample_on_grid(g, np.sin)
    fp = FracFlowParams(FracOrder(0.6), s=0.75, nu=0.5)
    traj = frac_burgers_solve(u0, fp, TimeGrid(0.0, 1.0, 256), nonlinear=False)
    exact = mittag_leffler(0.6, -0.5)
    assert abs(_mode_amp(traj[-1], 1) - exact) < 1e-3


def test_classical_limit_exponential_decay():
    g = PeriodicGrid(2 * np.pi, 16)
    u0 = sample_on_grid(g, np.sin)
    fp = FracFlowParams(FracOrder(1.0 - 1e-6), s=1.0, nu=0.3)
    traj = frac_burgers_solve(u0, fp, TimeGrid(0.0, 1.0, 256), nonlinear=False)
    assert abs(_mode_amp(traj[-1], 1) - math.exp(-0.3)) < 1e-2


def test_step_restriction_guard():
    g = PeriodicGrid(2 * np.pi, 256)
    u0 = sample_on_grid(g, np.sin)
    fp = FracFlowParams(FracOrder(0.3), s=1.0, nu=1.0)
    with pytest.raises(ValueError, match="step restriction"):
        frac_burgers_solve(u0, fp, TimeGrid(0.0, 1.0, 16))


def test_divergence_detector():
    g = PeriodicGrid(2 * np.pi, 64)
    # huge amplitude makes the explicit advection blow up quickly
    u0 = Field(200.0 * np.sin(3 * g.coords()), g.spacing)
    fp = FracFlowParams(FracOrder(0.6), s=0.8, nu=0.05)
    with pytest.raises(SolverDivergence):
        frac_burgers_solve(u0, fp, TimeGrid(0.0, 1.0, 512))


def test_trajectories_reproducible_with_forcing():
    g = PeriodicGrid(2 * np.pi, 64)
    u0 = synth_velocity(SpectrumSpec(exponent=4.0, modes=6, seed=3), g)
    u0 = Field(0.3 * u0.values, u0.spacing)
    fp = FracFlowParams(FracOrder(0.6), s=0.8, nu=0.05, sigma_f=0.05)
    tg = TimeGrid(0.0, 0.25, 256)
    t1 = frac_burgers_solve(u0, fp, tg, noise_seed=11)
    t2 = frac_burgers_solve(u0, fp, tg, noise_seed=11)
    assert all(np.array_equal(a.values, b.values) for a, b in zip(t1, t2))
    t3 = frac_burgers_solve(u0, fp, tg, noise_seed=12)
    assert not np.array_equal(t1[-1].values, t3[-1].values)


def test_energy_dissipation_eigenfunction():
    g = PeriodicGrid(2 * np.pi, 256)
    u = sample_on_grid(g, lambda x: np.sin(3 * x))
    fp = FracFlowParams(FracOrder(0.5), s=0.6, nu=0.1)
    assert energy_dissipation(u, fp) == pytest.approx(0.1 * 3**1.2 * math.pi, abs=1e-10)


def test_energy_dissipation_constant_and_additivity():
    g = PeriodicGrid(2 * np.pi, 256)
    fp = FracFlowParams(FracOrder(0.5), s=0.6, nu=0.1)
    const = sample_on_grid(g, lambda x: np.full_like(x, 3.3))
    assert energy_dissipation(const, fp) == 0.0
    u1 = sample_on_grid(g, np.sin)
    u4 = sample_on_grid(g, lambda x: np.sin(4 * x))
    both = sample_on_grid(g, lambda x: np.sin(x) + np.sin(4 * x))
    assert energy_dissipation(both, fp) == pytest.approx(
        energy_dissipation(u1, fp) + energy_dissipation(u4, fp), rel=1e-12
    )


def test_energy_dissipation_parseval_consistency():
    # spatial quadrature of |(-Lap)^{s/2} u|^2 equals the spectral sum
    g = PeriodicGrid(2 * np.pi, 512)
    u = synth_velocity(SpectrumSpec(exponent=3.0, modes=10, seed=2), g)
    fp = FracFlowParams(FracOrder(0.5), s=0.7, nu=0.4)
    half = frac_laplacian(u, fp.s / 2.0)
    spatial = fp.nu * float(np.sum(half.values**2) * u.spacing)
    assert energy_dissipation(u, fp) == pytest.approx(spatial, abs=1e-10)


def test_dissipation_positive_iff_nonconstant():
    g = PeriodicGrid(2 * np.pi, 128)
    fp = FracFlowParams(FracOrder(0.5), s=0.8, nu=0.2)
    u = synth_velocity(SpectrumSpec(exponent=2.0, modes=4, seed=9), g)
    assert energy_dissipation(u, fp) > 0


def test_dissipation_convergence_decreasing():
    g = PeriodicGrid(2 * np.pi, 4096)
    u = sample_on_grid(g, lambda x: np.sin(3 * x))
    fp = FracFlowParams(FracOrder(0.5), s=0.6, nu=0.1)
    rep = dissipation_convergence(u, fp, [8, 16, 32, 64])
    gaps = [r.value for r in rep.rows if r.param == "deterministic"]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    with pytest.raises(ValueError):
        dissipation_convergence(u, fp, [16, 8])


def test_dissipation_convergence_constant_field_is_exact():
    g = PeriodicGrid(2 * np.pi, 2048)
    u = sample_on_grid(g, lambda x: np.full_like(x, 1.0))
    fp = FracFlowParams(FracOrder(0.5), s=0.6, nu=0.1)
    rep = dissipation_convergence(u, fp, [8, 16])
    gaps = [r.value for r in rep.rows if r.param == "deterministic"]
    assert max(gaps) == 0.0


def test_dissipation_monte_carlo_column_approaches_deterministic():
    g = PeriodicGrid(2 * np.pi, 2048)
    u = sample_on_grid(g, lambda x: np.sin(3 * x))
    fp = FracFlowParams(FracOrder(0.5), s=0.6, nu=0.1)
    nm = NoiseModel(sigma=0.3, base_seed=9, kind="white_noise_measure")
    rep1 = dissipation_convergence(u, fp, [8], noise=nm, replicates=1)
    repN = dissipation_convergence(u, fp, [8], noise=nm, replicates=10_000)
    det = next(r.value for r in rep1.rows if r.param == "deterministic")

    def mc_gap(rep):
        return next(r.value for r in rep.rows if r.param.startswith("mc"))

    assert abs(mc_gap(repN) - det) < abs(mc_gap(rep1) - det)


def test_l2_convergence_smooth_slope():
    g = PeriodicGrid(2 * np.pi, 4096)
    u = sample_on_grid(g, np.sin)
    rep = l2_convergence(u, [8, 16, 32, 64])
    errs = [r.value for r in rep.rows]
    A = np.vstack([np.log([8, 16, 32, 64]), np.ones(4)]).T
    slope = np.linalg.lstsq(A, np.log(errs), rcond=None)[0][0]
    assert slope == pytest.approx(-2.0, abs=0.3)


def test_l2_convergence_constant_zero():
    g = PeriodicGrid(2 * np.pi, 2048)
    u = sample_on_grid(g, lambda x: np.full_like(x, 2.0))
    rep = l2_convergence(u, [8, 16])
    assert max(r.value for r in rep.rows) < 1e-12


def test_snapshot_roundtrip(tmp_path):
    g = PeriodicGrid(2 * np.pi, 128)
    u = synth_velocity(SpectrumSpec(exponent=4.0, modes=5, seed=1), g)
    bpath = tmp_path / "field.bin"
    save_field_binary(u, bpath)
    back = load_field_binary(bpath)
    assert np.array_equal(back.values, u.values)
    assert back.spacing == u.spacing
    assert bpath.stat().st_size == 16 + 128 * 2 * 8

    cpath = tmp_path / "field.csv"
    save_field_csv(u, cpath)
    lines = cpath.read_text().splitlines()
    assert lines[0] == "x,u"
    assert len(lines) == 129
    x0, v0 = (float(p) for p in lines[1].split(","))
    assert x0 == 0.0
    assert v0 == u.values[0]

    with pytest.raises(ValueError):
        bad = tmp_path / "bad.bin"
        bad.write_bytes(b"NOTMAGIC" + b"\0" * 8)
        load_field_binary(bad)
