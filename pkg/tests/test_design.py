import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from slowsbs import analytics, design
from slowsbs.design import Budgets, DesignGrid
from slowsbs.errors import DegenerateDesignWarning, InfeasibleDesignError, ZeroBandwidthError
from slowsbs.params import DualPumpConfig, WaveguideParams

COLD = WaveguideParams(g=1e6, gamma=1e8, v_g=1e8, length=1e-2, omega_phonon=5e10, n_bar=0.0)
WARM = WaveguideParams(g=1e6, gamma=1e8, v_g=1e8, length=1e-2, omega_phonon=5e10, n_bar=0.0224)


def test_intensity_ratio_examples(cold_params):
    assert design.balance_intensity_ratio(0.5, 2.0) == pytest.approx(0.25, rel=1e-15)
    assert design.balance_intensity_ratio(1.3, 1.3) == 1.0
    a = design.balance_intensity_ratio(0.0, 2.0)
    assert a == pytest.approx(0.2, rel=1e-15)
    r = analytics.dual_response(cold_params, DualPumpConfig.from_scaled(a * 1e8, 0.0, 1e8, 2.0), strict=False)
    assert abs(r.gain_per_length * cold_params.length) < 1e-12


def test_balance_nominal_design(cold_params):
    sol = design.balance_detuning(0.25, 0.25, cold_params, 1e8)
    assert sol.delta_l == pytest.approx(2.0, rel=1e-15)
    assert sol.delta_u == pytest.approx(0.5, rel=1e-15)
    assert sol.branch == design.BRANCH_BELOW
    assert sol.residual < 1e-10


def test_balance_sqrt_two(cold_params):
    sol = design.balance_detuning(0.5, 0.5, cold_params, 1e8)
    assert sol.delta_l == pytest.approx(math.sqrt(2.0), rel=1e-15)
    r = analytics.dual_response(cold_params, sol.config(1e8), strict=False)
    assert abs(r.gain_per_length * cold_params.length) < 1e-10


def test_balance_degenerate():
    with pytest.warns(DegenerateDesignWarning):
        sol = design.balance_detuning(1.0, 0.7)
    assert sol.delta_l == 0.0 and sol.branch == design.BRANCH_DEGENERATE


@pytest.mark.parametrize("a,b", [(2.0, 0.5), (0.1, 0.5), (0.5, 2.0), (-1.0, 0.1), (0.25, 0.5)])
def test_balance_infeasible(a, b):
    with pytest.raises(InfeasibleDesignError, match="infeasible branch"):
        design.balance_detuning(a, b)


admissible = st.one_of(
    st.tuples(st.floats(0.05, 0.95), st.floats(0.0, 1.0)).filter(lambda ab: ab[1] ** 2 < ab[0] * 0.98),
    st.tuples(st.floats(1.05, 20.0), st.floats(1.0, 10.0)).filter(lambda ab: ab[1] ** 2 > ab[0] * 1.02),
)


@settings(max_examples=200, deadline=None)
@given(ab=admissible, il=st.floats(1e4, 1e8))
def test_round_trip_zero_gain(ab, il):
    cold_params = COLD
    a, b = ab
    sol = design.balance_detuning(a, b, cold_params, il)
    assert sol.residual < 1e-10
    r = analytics.dual_response(cold_params, sol.config(il), strict=False)
    assert abs(r.gain_per_length * cold_params.length) < 1e-10
    assert sol.delta_l ** 2 == pytest.approx((1 - a) / (a - b * b), rel=1e-12)
    below = b * b < a < 1.0
    above = 1.0 < a < b * b
    assert below != above
    assert sol.branch == (design.BRANCH_BELOW if below else design.BRANCH_ABOVE)


def test_feasibility_nominal(nominal_params, nominal_dual):
    rep = design.feasibility(nominal_params, nominal_dual, Budgets(1e-3, 0.1, 0.1))
    assert rep.passed
    assert rep.velocity_ratio == pytest.approx(1.04e-4, rel=1e-2)
    assert abs(rep.gain_times_length) < 1e-10
    assert rep.thermal_out == pytest.approx(2.78e-3, rel=1e-2)
    for flag in rep.flags.values():
        assert math.isfinite(flag.value) and math.isfinite(flag.limit)
    margin = rep.flags["adiabatic_margin"]
    assert margin.value == pytest.approx(100.0) and not margin.passed and not margin.enforced


def test_feasibility_single_pump_fails_gain(nominal_params):
    rep = design.feasibility(nominal_params, DualPumpConfig.from_scaled(2.5e7, 0.5, 0.0, 0.0))
    assert not rep.passed
    assert "abs_GL" in rep.failures()
    assert rep.flags["abs_GL"].value == pytest.approx(40.0, rel=1e-12)


def test_feasibility_no_coupling_fails_velocity(nominal_params, nominal_dual):
    rep = design.feasibility(nominal_params.replace(g=0.0), nominal_dual)
    assert rep.velocity_ratio == 1.0
    assert "velocity_ratio" in rep.failures()


def test_bandwidth_nominal_within_factor_two_of_slope_bound(nominal_params, nominal_dual):
    bw = design.bandwidth_estimate(nominal_params, nominal_dual, 0.1, 0.5)
    slope = analytics.dual_response(nominal_params, nominal_dual).gain_slope
    bound = 0.1 / (abs(slope) * nominal_params.length)
    assert bound == pytest.approx(78125.0, rel=1e-12)
    assert not bw.window_limited
    assert 0.5 * bound <= bw.half_width <= 2.0 * bound


def test_bandwidth_window_limited_without_coupling(nominal_params, nominal_dual):
    bw = design.bandwidth_estimate(nominal_params.replace(g=0.0), nominal_dual, 0.1, 0.5)
    assert bw.window_limited
    assert bw.half_width == pytest.approx(50 * nominal_params.gamma)


def test_bandwidth_zero_budget(nominal_params, nominal_dual):
    with pytest.raises(ZeroBandwidthError, match="zero bandwidth"):
        design.bandwidth_estimate(nominal_params, nominal_dual, 0.0, 0.5)


@settings(max_examples=30, deadline=None)
@given(ab=admissible, il=st.floats(1e7, 1e9), budget=st.floats(1e-3, 1.0))
def test_bandwidth_matches_slope_bound_when_binding(ab, il, budget):
    cold_params = COLD
    a, b = ab
    sol = design.balance_detuning(a, b)
    dual = sol.config(il)
    resp = analytics.dual_response(cold_params, dual, strict=False)
    slope = resp.gain_slope
    assume(abs(slope) > 0.0 and resp.velocity_ratio > 0.0)
    bound = budget / (abs(slope) * cold_params.length)
    # slope binding: the velocity budget is loose and the band stays well inside the Lorentzians
    assume(bound < 1e-2 * cold_params.gamma)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        bw = design.bandwidth_estimate(cold_params, dual, budget, 1e9)
    assert 0.5 * bound <= bw.half_width <= 2.0 * bound


def _nominal_grid():
    return DesignGrid([0.2, 0.25, 0.3], [0.2, 0.25, 0.3], [5e7, 1e8])


def test_search_contains_nominal_design(nominal_params):
    ranked = design.feasible_design_search(nominal_params, _nominal_grid(), Budgets(1e-3, 0.1, 0.1))
    found = [
        r for r in ranked
        if r.config.lower.intensity == 1e8
        and r.config.lower.detuning_scaled == pytest.approx(2.0)
        and r.config.upper.detuning_scaled == pytest.approx(0.5)
    ]
    assert len(found) == 1
    ratios = [r.velocity_ratio for r in ranked]
    assert ratios == sorted(ratios)


def test_search_empty(nominal_params):
    with pytest.raises(InfeasibleDesignError, match="empty feasible set"):
        design.feasible_design_search(nominal_params, _nominal_grid(), Budgets(max_velocity_ratio=0.0))


def test_tie_break_on_thermal(nominal_params, nominal_dual):
    # I -> 4 I and gamma -> 2 gamma keep g^2 I / gamma^2 and so v_e fixed; N_out changes
    scaled_params = nominal_params.replace(gamma=2 * nominal_params.gamma)
    scaled = DualPumpConfig.from_scaled(4 * 2.5e7, 0.5, 4 * 1e8, 2.0)
    r1 = design.feasibility(nominal_params, nominal_dual)
    r2 = design.feasibility(scaled_params, scaled)
    assert r1.velocity_ratio == r2.velocity_ratio
    assert r2.thermal_out > r1.thermal_out
    assert design.rank_reports([r2, r1]) == [r1, r2]
    assert design.rank_reports([r1, r2]) == [r1, r2]


def _feasible_keys(params, grid, budgets):
    try:
        ranked = design.feasible_design_search(params, grid, budgets)
    except InfeasibleDesignError:
        return set()
    return {(r.config.upper.intensity, r.config.lower.detuning_scaled, r.config.upper.detuning_scaled) for r in ranked}


@settings(max_examples=10, deadline=None)
@given(
    v=st.floats(1e-5, 1e-2), gl=st.floats(1e-3, 1.0), n=st.floats(1e-4, 1e-1),
    which=st.sampled_from(["max_velocity_ratio", "max_abs_GL", "max_thermal_out"]),
    factor=st.floats(1.0, 10.0),
)
def test_budget_monotonicity(v, gl, n, which, factor):
    nominal_params = WARM
    grid = DesignGrid([0.15, 0.25, 0.5], [0.1, 0.25, 0.35], [1e7, 1e8])
    small = Budgets(v, gl, n)
    large = Budgets(**{**small.__dict__, which: getattr(small, which) * factor})
    assert _feasible_keys(nominal_params, grid, small) <= _feasible_keys(nominal_params, grid, large)
