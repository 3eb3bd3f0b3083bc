import math

import numpy as np
import pytest

from slowsbs import analytics
from slowsbs.errors import NumericalInstabilityError
from slowsbs.params import DualPumpConfig, WaveguideParams, thermal_occupation
from slowsbs.propagator import Grid, monte_carlo_density, thermal_quadrature
from slowsbs.propagator.thermal import trajectory_rng

N_BAR = thermal_occupation(5e10, 0.1)
WARM = WaveguideParams(g=1e6, gamma=1e8, v_g=1e8, length=1e-2, omega_phonon=5e10, temperature=0.1, n_bar=N_BAR)
COLD = WARM.replace(temperature=None, n_bar=0.0)
DESK_UPPER = DualPumpConfig.from_scaled(2.5e5, 0.5, 0.0, 0.0)
T_OBS = 5.0 / WARM.gamma


def test_quadrature_trivial_zeroes():
    lower_only = DualPumpConfig.from_scaled(0.0, 0.0, 1e8, 2.0)
    assert thermal_quadrature(COLD, lower_only, COLD.length, 1e-6) == 0.0
    assert thermal_quadrature(WARM, DESK_UPPER, 0.0, 1e-6) == 0.0
    assert thermal_quadrature(WARM, DESK_UPPER, WARM.length, 0.0) == 0.0


def test_quadrature_rejects_bad_points():
    with pytest.raises(ValueError):
        thermal_quadrature(WARM, DESK_UPPER, 2 * WARM.length, 1e-6)
    with pytest.raises(ValueError):
        thermal_quadrature(WARM, DESK_UPPER, WARM.length, -1.0)


@pytest.mark.parametrize(
    "pumps",
    [
        DualPumpConfig.from_scaled(2.5e7, 0.5, 0.0, 0.0),
        DualPumpConfig.from_scaled(0.0, 0.0, 1e8, 2.0),
        DESK_UPPER,
    ],
)
def test_quadrature_matches_single_closed_form(pumps):
    ch = pumps.upper if pumps.upper.intensity else pumps.lower
    expected = analytics.thermal_density_single(WARM, ch, WARM.length, T_OBS).value
    got = thermal_quadrature(WARM, pumps, WARM.length, T_OBS, 800, 800)
    assert got == pytest.approx(expected, rel=1e-2)


def test_quadrature_matches_dual_closed_form(nominal_dual):
    t = 1e-7
    expected = analytics.thermal_density_dual(WARM, nominal_dual, 0.6 * WARM.length, t).value
    got = thermal_quadrature(WARM, nominal_dual, 0.6 * WARM.length, t, 400, 800)
    assert got == pytest.approx(expected, rel=1e-3)


def test_quadrature_converges_under_refinement():
    pumps = DualPumpConfig.from_scaled(2.5e7, 0.5, 0.0, 0.0)
    exact = analytics.thermal_density_single(WARM, pumps.upper, WARM.length, T_OBS).value
    errs = [abs(thermal_quadrature(WARM, pumps, WARM.length, T_OBS, n, n) - exact) for n in (200, 400)]
    assert errs[1] < 0.3 * errs[0]


def test_mc_zero_without_sources():
    lower_only = DualPumpConfig.from_scaled(0.0, 0.0, 1e6, 2.0)
    grid = Grid.for_duration(COLD, 5, 1e-9)
    res = monte_carlo_density(COLD, lower_only, grid, 3, seed=1)
    assert np.all(res.mean == 0.0) and np.all(res.standard_error == 0.0)


def test_mc_needs_two_trajectories():
    grid = Grid.for_duration(WARM, 5, 1e-9)
    with pytest.raises(ValueError, match="at least 2"):
        monte_carlo_density(WARM, DESK_UPPER, grid, 1, seed=1)


def _small_run(**kw):
    grid = Grid.for_duration(WARM, 10, T_OBS)
    return monte_carlo_density(WARM, DESK_UPPER, grid, 40, seed=kw.pop("seed", 11), **kw)


def test_mc_reproducible_and_scheduling_independent():
    a = _small_run()
    b = _small_run()
    c = _small_run(workers=4)
    assert np.array_equal(a.mean, b.mean) and np.array_equal(a.standard_error, b.standard_error)
    assert np.array_equal(a.mean, c.mean)
    d = _small_run(seed=12)
    assert not np.array_equal(a.mean, d.mean)


def test_mc_snapshots():
    grid = Grid.for_duration(WARM, 10, T_OBS)
    every = grid.nt // 4
    res = monte_carlo_density(WARM, DESK_UPPER, grid, 4, seed=3, snapshot_every=every)
    assert res.mean.shape == (len(res.times), grid.nz)
    assert res.times[-1] == pytest.approx(grid.nt * grid.dt)
    # the noise floor builds up from zero
    assert res.mean[0, -1] < res.mean[-1, -1]


def test_mc_agrees_with_quadrature_roughly():
    grid = Grid.for_duration(WARM, 10, T_OBS)
    res = monte_carlo_density(WARM, DESK_UPPER, grid, 200, seed=5)
    expected = thermal_quadrature(WARM, DESK_UPPER, WARM.length, grid.nt * grid.dt, 400, 400)
    assert abs(res.output_density - expected) < 4 * res.output_error


def test_trajectory_streams_independent_of_order():
    first = trajectory_rng(7, 3).standard_normal(4)
    trajectory_rng(7, 0).standard_normal(100)
    again = trajectory_rng(7, 3).standard_normal(4)
    assert np.array_equal(first, again)
    assert not np.array_equal(first, trajectory_rng(7, 4).standard_normal(4))


def test_mc_non_finite_detected():
    grid = Grid.for_duration(WARM, 200, 1e-9)
    huge = DualPumpConfig.from_scaled(1e16, 0.0, 0.0, 0.0)
    with pytest.raises(NumericalInstabilityError):
        monte_carlo_density(WARM, huge, grid, 2, seed=1, mode="full")
