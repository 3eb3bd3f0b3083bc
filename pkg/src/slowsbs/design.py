"""Zero-gain balance and feasibility screening for dual-pump operating points."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import analytics
from .errors import DegenerateDesignWarning, InfeasibleDesignError, ZeroBandwidthError
from .params import DualPumpConfig, WaveguideParams

BRANCH_ABOVE = "1<a<b^2"
BRANCH_BELOW = "b^2<a<1"
BRANCH_DEGENERATE = "degenerate"


def balance_intensity_ratio(delta_u: float, delta_l: float) -> float:
    """Intensity ratio ``I_u / I_l`` that cancels the net gain."""
    return (1.0 + delta_u * delta_u) / (1.0 + delta_l * delta_l)


@dataclass(frozen=True)
class BalanceSolution:
    delta_l: float
    delta_u: float
    intensity_ratio: float
    branch: str
    residual: float

    @property
    def detuning_ratio(self) -> float:
        return self.delta_u / self.delta_l if self.delta_l else math.nan

    def config(self, intensity_lower: float) -> DualPumpConfig:
        return DualPumpConfig.from_scaled(
            self.intensity_ratio * intensity_lower, self.delta_u, intensity_lower, self.delta_l
        )


def balance_detuning(
    a: float,
    b: float,
    params: WaveguideParams | None = None,
    intensity_lower: float | None = None,
) -> BalanceSolution:
    """Solve ``delta^2 = (1 - a) / (a - b^2)`` for the positive root.

    With ``params`` and ``intensity_lower`` the residual is ``|G L|`` of the
    implied configuration; otherwise it is the net gain relative to the
    lower-channel loss.
    """
    if not (a > 0.0 and math.isfinite(a) and math.isfinite(b)):
        raise InfeasibleDesignError(f"infeasible branch: need a > 0 and finite b (a={a!r}, b={b!r})")
    num = 1.0 - a
    den = a - b * b
    if num == 0.0:
        warnings.warn("degenerate balance: a = 1 forces both detunings to zero", DegenerateDesignWarning, stacklevel=2)
        delta = 0.0
        branch = BRANCH_DEGENERATE
    else:
        if den == 0.0 or num / den <= 0.0:
            raise InfeasibleDesignError(
                f"infeasible branch: (1-a)/(a-b^2) = {num!r}/{den!r} has no positive root"
            )
        delta = math.sqrt(num / den)
        branch = BRANCH_ABOVE if a > 1.0 else BRANCH_BELOW
    delta_u = b * delta
    if params is not None and intensity_lower is not None:
        dual = DualPumpConfig.from_scaled(a * intensity_lower, delta_u, intensity_lower, delta)
        gain = analytics.gain_single(params, dual.upper) - analytics.gain_single(params, dual.lower)
        residual = abs(gain) * params.length
    else:
        residual = abs(a / (1.0 + delta_u * delta_u) - 1.0 / (1.0 + delta * delta)) * (1.0 + delta * delta)
    return BalanceSolution(delta, delta_u, a, branch, residual)


# --- feasibility -------------------------------------------------------------

@dataclass(frozen=True)
class Budgets:
    max_velocity_ratio: float = 1e-3
    max_abs_GL: float = 0.1
    max_thermal_out: float = 0.1
    velocity_tolerance: float = 0.5


@dataclass(frozen=True)
class Flag:
    value: float
    limit: float
    passed: bool
    enforced: bool = True


@dataclass(frozen=True)
class FeasibilityReport:
    config: DualPumpConfig
    velocity_ratio: float
    gain_times_length: float
    thermal_out: float
    bandwidth: float
    bandwidth_window_limited: bool
    flags: dict[str, Flag] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(f.passed for f in self.flags.values() if f.enforced)

    def failures(self) -> list[str]:
        return [name for name, f in self.flags.items() if f.enforced and not f.passed]


@dataclass(frozen=True)
class BandwidthEstimate:
    half_width: float
    window_limited: bool


def _shift_response(params, dual, offsets):
    """Net GL and velocity ratio for an array of signal offsets (rad/s)."""
    step = 2.0 * offsets / params.gamma
    du = dual.upper.detuning_scaled - step
    dl = dual.lower.detuning_scaled + step
    gain, _ = analytics.dual_rates(params, dual.upper.intensity, du, dual.lower.intensity, dl)
    denom = analytics.dual_velocity_denominator(params, dual.upper.intensity, du, dual.lower.intensity, dl)
    with np.errstate(divide="ignore"):
        ratio = np.where(denom > 0.0, 1.0 / denom, np.nan)
    return gain * params.length, ratio


def bandwidth_estimate(
    params: WaveguideParams,
    dual: DualPumpConfig,
    gain_budget: float,
    velocity_tolerance: float,
    window: float | None = None,
    scan_points: int = 4000,
) -> BandwidthEstimate:
    """Half-width of the signal band over which gain and group velocity stay in budget.

    A shift ``dw`` moves ``delta_u -> delta_u - 2 dw / gamma`` and
    ``delta_l -> delta_l + 2 dw / gamma``. Both signs are scanned densely out to
    ``window`` (default ``50 gamma``) on a geometric grid and the first
    violation is refined by bisection.
    """
    if window is None:
        window = 50.0 * params.gamma

    def ok(offsets):
        gl, ratio = _shift_response(params, dual, offsets)
        return (np.abs(gl) <= gain_budget) & np.isfinite(ratio) & (np.abs(ratio / v0 - 1.0) <= velocity_tolerance)

    gl0, r0 = _shift_response(params, dual, np.zeros(1))
    v0 = r0[0]
    if not (np.isfinite(v0) and abs(gl0[0]) <= gain_budget) or gain_budget <= 0.0:
        raise ZeroBandwidthError(
            f"zero bandwidth: centre has |GL|={abs(gl0[0]):.3g} (budget {gain_budget!r}), v_e/v_g={v0!r}"
        )
    if abs(gl0[0]) >= gain_budget / 10.0:
        warnings.warn("centre frequency is not balanced to a tenth of the gain budget", stacklevel=2)

    grid = np.geomspace(window * 1e-9, window, scan_points)
    good = ok(grid) & ok(-grid)
    bad = np.flatnonzero(~good)
    if bad.size == 0:
        return BandwidthEstimate(float(window), True)
    k = bad[0]
    lo = float(grid[k - 1]) if k > 0 else 0.0
    hi = float(grid[k])
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if bool(ok(np.array([mid]))[0] and ok(np.array([-mid]))[0]):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return BandwidthEstimate(float(lo), False)


def adiabatic_margin(params: WaveguideParams, dual: DualPumpConfig) -> float:
    """``g sqrt(I) / gamma`` for the stronger pump; elimination wants this << 1."""
    strongest = max(dual.upper.intensity, dual.lower.intensity)
    return params.g * math.sqrt(strongest) / params.gamma


def feasibility(params: WaveguideParams, dual: DualPumpConfig, budgets: Budgets | None = None) -> FeasibilityReport:
    budgets = budgets or Budgets()
    resp = analytics.dual_response(params, dual, strict=False)
    gl = resp.gain_per_length * params.length
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        n_out = analytics.thermal_out(params, dual)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            bw = bandwidth_estimate(params, dual, budgets.max_abs_GL, budgets.velocity_tolerance)
    except ZeroBandwidthError:
        bw = BandwidthEstimate(0.0, False)
    ratio = resp.velocity_ratio
    transit = params.gamma * params.length / params.v_g
    margin = adiabatic_margin(params, dual)
    flags = {
        "velocity_ratio": Flag(ratio, budgets.max_velocity_ratio, bool(0.0 < ratio <= budgets.max_velocity_ratio)),
        "abs_GL": Flag(abs(gl), budgets.max_abs_GL, bool(abs(gl) <= budgets.max_abs_GL)),
        "thermal_out": Flag(n_out, budgets.max_thermal_out, bool(n_out <= budgets.max_thermal_out)),
        "transit_damping": Flag(transit, 0.1, bool(transit <= 0.1), enforced=False),
        "adiabatic_margin": Flag(margin, 1.0, bool(margin <= 1.0), enforced=False),
    }
    return FeasibilityReport(dual, ratio, gl, n_out, bw.half_width, bw.window_limited, flags)


# --- grid search -------------------------------------------------------------

@dataclass(frozen=True)
class DesignGrid:
    a_values: Sequence[float]
    b_values: Sequence[float]
    intensity_lower_values: Sequence[float]

    def points(self) -> Iterable[tuple[float, float, float]]:
        return itertools.product(self.a_values, self.b_values, self.intensity_lower_values)


def rank_reports(reports: Iterable[FeasibilityReport]) -> list[FeasibilityReport]:
    """Slowest first; ties broken by lower thermal output, then input order."""
    return sorted(reports, key=lambda r: (r.velocity_ratio, r.thermal_out))


def feasible_design_search(
    params: WaveguideParams, grid: DesignGrid, budgets: Budgets | None = None
) -> list[FeasibilityReport]:
    budgets = budgets or Budgets()
    feasible = []
    for a, b, intensity in grid.points():
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DegenerateDesignWarning)
                sol = balance_detuning(a, b)
        except InfeasibleDesignError:
            continue
        if sol.branch == BRANCH_DEGENERATE:
            continue
        report = feasibility(params, sol.config(intensity), budgets)
        if report.passed:
            feasible.append(report)
    if not feasible:
        raise InfeasibleDesignError("empty feasible set")
    return rank_reports(feasible)
