"""One-dimensional parameter sweeps and the named presets built on them."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import analytics, design
from .errors import ConfigError, DegenerateDesignWarning, InfeasibleDesignError
from .params import DualPumpConfig, WaveguideParams, thermal_occupation

AXES = ("delta_u", "delta_l", "detuning_ratio", "intensity_ratio", "signal_frequency_offset")
RATIO_AXES = ("detuning_ratio", "intensity_ratio")
BALANCE_MODES = ("free", "hold_zero_gain")

COLUMNS = (
    "axis_name",
    "axis_value",
    "delta_u",
    "delta_l",
    "intensity_u",
    "intensity_l",
    "GL",
    "kappaL",
    "velocity_ratio",
    "gain_slope",
    "thermal_out",
    "status",
)

OK = "ok"
INFEASIBLE = "infeasible"
DEGENERATE = "degenerate"
SUPERLUMINAL = "superluminal"


@dataclass(frozen=True)
class SweepSpec:
    """Sweep ``axis`` over ``points`` evenly spaced values in ``[start, stop]``.

    On ratio axes the fixed ratio (``a`` while sweeping ``b`` and vice versa)
    comes from the base configuration. ``hold_zero_gain`` re-solves the
    lower detuning from the balance condition at every point and keeps the
    base lower intensity.
    """

    axis: str
    start: float
    stop: float
    points: int
    balance_mode: str = "free"

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"unknown sweep axis {self.axis!r}; expected one of {AXES}")
        if self.balance_mode not in BALANCE_MODES:
            raise ConfigError(f"unknown balance mode {self.balance_mode!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop) and self.start < self.stop):
            raise ConfigError(f"empty sweep range: need start < stop, got [{self.start!r}, {self.stop!r}]")
        if self.points < 2:
            raise ConfigError(f"sweep needs at least 2 points, got {self.points}")
        if self.balance_mode == "hold_zero_gain" and self.axis not in RATIO_AXES:
            raise ConfigError(f"hold_zero_gain is only valid on ratio axes, not {self.axis!r}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


def _empty_row(axis, value, status, du=math.nan, dl=math.nan, iu=math.nan, il=math.nan):
    row = dict.fromkeys(COLUMNS, math.nan)
    row.update(axis_name=axis, axis_value=float(value), delta_u=du, delta_l=dl, intensity_u=iu, intensity_l=il)
    row["status"] = status
    return row


def _evaluate(params: WaveguideParams, axis: str, value: float, dual: DualPumpConfig, status: str = OK) -> dict:
    resp = analytics.dual_response(params, dual, strict=False)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        n_out = analytics.thermal_out(params, dual)
    if not resp.velocity_ratio > 0.0 and status == OK:
        status = SUPERLUMINAL
    row = _empty_row(
        axis,
        value,
        status,
        dual.upper.detuning_scaled,
        dual.lower.detuning_scaled,
        dual.upper.intensity,
        dual.lower.intensity,
    )
    row.update(
        GL=resp.gain_per_length * params.length,
        kappaL=resp.kappa * params.length,
        velocity_ratio=resp.velocity_ratio,
        gain_slope=resp.gain_slope,
        thermal_out=n_out,
    )
    return row


def _point(params: WaveguideParams, base: DualPumpConfig, spec: SweepSpec, value: float) -> dict:
    up, lo = base.upper, base.lower
    axis = spec.axis
    if axis == "delta_u":
        dual = DualPumpConfig.from_scaled(up.intensity, value, lo.intensity, lo.detuning_scaled)
    elif axis == "delta_l":
        dual = DualPumpConfig.from_scaled(up.intensity, up.detuning_scaled, lo.intensity, value)
    elif axis == "signal_frequency_offset":
        dual = base.shifted(value, params.gamma)
    else:
        if axis == "detuning_ratio":
            a, b = base.a, value
        else:
            a, b = value, base.b
        if spec.balance_mode == "hold_zero_gain":
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", DegenerateDesignWarning)
                    sol = design.balance_detuning(a, b)
            except InfeasibleDesignError:
                return _empty_row(axis, value, INFEASIBLE, il=lo.intensity)
            status = DEGENERATE if sol.branch == design.BRANCH_DEGENERATE else OK
            return _evaluate(params, axis, value, sol.config(lo.intensity), status)
        delta_l = lo.detuning_scaled
        dual = DualPumpConfig.from_scaled(a * lo.intensity, b * delta_l, lo.intensity, delta_l)
    return _evaluate(params, axis, value, dual)


def sweep(params: WaveguideParams, base: DualPumpConfig, spec: SweepSpec) -> list[dict]:
    """One row per axis value, in axis order, with the :data:`COLUMNS` keys.

    Points where the balance has no solution are kept with status
    ``infeasible`` and NaN quantities; negative velocity ratios are marked
    ``superluminal`` and reported signed.
    """
    if spec.axis in RATIO_AXES:
        fixed = base.a if spec.axis == "detuning_ratio" else base.b
        if not math.isfinite(fixed):
            raise ConfigError(f"sweeping {spec.axis} needs a base config with a defined fixed ratio")
    return [_point(params, base, spec, float(v)) for v in spec.values()]


def column(rows: list[dict], name: str) -> np.ndarray:
    return np.array([row[name] for row in rows], dtype=float)


# --- named presets -------------------------------------------------------------

NOMINAL_PARAMS = WaveguideParams(
    g=1e6, gamma=1e8, v_g=1e8, length=1e-2, omega_phonon=5e10, temperature=0.1,
    n_bar=thermal_occupation(5e10, 0.1),
)

_NOMINAL_DUAL = DualPumpConfig.from_scaled(2.5e7, 0.5, 1e8, 2.0)


@dataclass(frozen=True)
class SweepPreset:
    name: str
    description: str
    base: DualPumpConfig
    spec: SweepSpec


PRESETS = {
    "gain_vs_detuning": SweepPreset(
        "gain_vs_detuning",
        "gain factor G L against scaled detuning, one pump at I = 1e8",
        DualPumpConfig.from_scaled(1e8, 0.0, 0.0, 0.0),
        SweepSpec("delta_u", -10.0, 10.0, 201),
    ),
    "upper_velocity": SweepPreset(
        "upper_velocity",
        "v_e / v_g against the upper detuning, upper pump only",
        DualPumpConfig.from_scaled(2.5e7, 0.0, 0.0, 0.0),
        SweepSpec("delta_u", -10.0, 10.0, 201),
    ),
    "lower_velocity": SweepPreset(
        "lower_velocity",
        "v_e / v_g against the lower detuning, lower pump only",
        DualPumpConfig.from_scaled(0.0, 0.0, 1e8, 0.0),
        SweepSpec("delta_l", -10.0, 10.0, 201),
    ),
    "balanced_velocity_vs_b": SweepPreset(
        "balanced_velocity_vs_b",
        "v_e / v_g at zero gain against b = delta_u / delta_l, a = 1/4",
        _NOMINAL_DUAL,
        SweepSpec("detuning_ratio", 0.01, 0.49, 49, "hold_zero_gain"),
    ),
    "balanced_velocity_vs_a": SweepPreset(
        "balanced_velocity_vs_a",
        "v_e / v_g at zero gain against a = I_u / I_l, b = 1/4",
        _NOMINAL_DUAL,
        SweepSpec("intensity_ratio", 0.0625 + 0.0025, 0.9975, 94, "hold_zero_gain"),
    ),
    "balanced_slope_vs_b": SweepPreset(
        "balanced_slope_vs_b",
        "gain slope at zero gain against b = delta_u / delta_l, a = 1/4",
        _NOMINAL_DUAL,
        SweepSpec("detuning_ratio", 0.01, 0.49, 49, "hold_zero_gain"),
    ),
}


def preset_sweep(name: str, params: WaveguideParams | None = None) -> list[dict]:
    try:
        preset = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown sweep preset {name!r}; expected one of {sorted(PRESETS)}") from None
    return sweep(params or NOMINAL_PARAMS, preset.base, preset.spec)
