"""Device and pump configuration.

All frequencies and rates are angular (rad/s). ``gamma`` is the phonon
energy damping rate, so phonon amplitudes decay as ``exp(-gamma t / 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import ConfigError

HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K

UPPER = "upper"
LOWER = "lower"

_NBAR_RTOL = 1e-3


def thermal_occupation(omega_phonon: float, temperature: float) -> float:
    """Bose-Einstein mean phonon number at angular frequency ``omega_phonon``."""
    if temperature <= 0.0:
        return 0.0
    x = HBAR * omega_phonon / (K_B * temperature)
    if x > 700.0:
        # expm1 overflows; 1 / (e^x - 1) equals e^-x to double precision here
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def scaled_detuning(delta_omega: float, gamma: float) -> float:
    """Detuning in units of half the phonon linewidth, ``2 dw / gamma``."""
    return 2.0 * delta_omega / gamma


@dataclass(frozen=True)
class WaveguideParams:
    g: float
    gamma: float
    v_g: float
    length: float
    omega_phonon: float
    temperature: float | None = None
    n_bar: float = 0.0

    def __post_init__(self):
        for name in ("gamma", "v_g", "length", "omega_phonon"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ConfigError(f"non-positive {name}: {value!r}")
        if not math.isfinite(self.g) or self.g < 0.0:
            raise ConfigError(f"coupling g must be >= 0, got {self.g!r}")
        if self.temperature is not None and (
            not math.isfinite(self.temperature) or self.temperature < 0.0
        ):
            raise ConfigError(f"negative temperature: {self.temperature!r}")
        if not math.isfinite(self.n_bar) or self.n_bar < 0.0:
            raise ConfigError(f"negative n_bar: {self.n_bar!r}")

    @property
    def transit_time(self) -> float:
        return self.length / self.v_g

    @property
    def noise(self) -> "LangevinNoiseSpec":
        return LangevinNoiseSpec(self.gamma, self.n_bar)

    def replace(self, **changes) -> "WaveguideParams":
        values = {
            "g": self.g,
            "gamma": self.gamma,
            "v_g": self.v_g,
            "length": self.length,
            "omega_phonon": self.omega_phonon,
            "temperature": self.temperature,
            "n_bar": self.n_bar,
        }
        values.update(changes)
        return WaveguideParams(**values)


@dataclass(frozen=True)
class PumpChannel:
    intensity: float
    detuning_scaled: float
    role: str = UPPER

    def __post_init__(self):
        if self.role not in (UPPER, LOWER):
            raise ConfigError(f"pump role must be 'upper' or 'lower', got {self.role!r}")
        if not math.isfinite(self.intensity) or self.intensity < 0.0:
            raise ConfigError(f"pump intensity must be >= 0, got {self.intensity!r}")
        if not math.isfinite(self.detuning_scaled):
            raise ConfigError(f"detuning must be finite, got {self.detuning_scaled!r}")

    def shifted(self, signal_offset: float, gamma: float) -> "PumpChannel":
        """Channel seen by a signal component offset by ``signal_offset`` rad/s.

        The upper detuning ``w_u - w_s - W`` falls as the signal frequency rises,
        the lower detuning ``w_s - w_l - W`` grows.
        """
        step = 2.0 * signal_offset / gamma
        sign = -1.0 if self.role == UPPER else 1.0
        return PumpChannel(self.intensity, self.detuning_scaled + sign * step, self.role)


@dataclass(frozen=True)
class DualPumpConfig:
    upper: PumpChannel = field(default_factory=lambda: PumpChannel(0.0, 0.0, UPPER))
    lower: PumpChannel = field(default_factory=lambda: PumpChannel(0.0, 0.0, LOWER))

    def __post_init__(self):
        if self.upper.role != UPPER or self.lower.role != LOWER:
            raise ConfigError("DualPumpConfig needs an upper and a lower channel")

    @classmethod
    def from_scaled(cls, intensity_u, delta_u, intensity_l, delta_l) -> "DualPumpConfig":
        return cls(PumpChannel(intensity_u, delta_u, UPPER), PumpChannel(intensity_l, delta_l, LOWER))

    @property
    def a(self) -> float:
        """Intensity ratio upper/lower (nan without a lower pump)."""
        if self.lower.intensity > 0.0:
            return self.upper.intensity / self.lower.intensity
        return math.nan

    @property
    def b(self) -> float:
        """Detuning ratio upper/lower (nan for zero lower detuning)."""
        if self.lower.detuning_scaled != 0.0:
            return self.upper.detuning_scaled / self.lower.detuning_scaled
        return math.nan

    def shifted(self, signal_offset: float, gamma: float) -> "DualPumpConfig":
        return DualPumpConfig(
            self.upper.shifted(signal_offset, gamma), self.lower.shifted(signal_offset, gamma)
        )


@dataclass(frozen=True)
class LangevinNoiseSpec:
    """Delta-correlated phonon bath, phase insensitive, channels independent."""

    gamma: float
    n_bar: float

    @property
    def normal_strength(self) -> float:
        """<F^dag F> per unit time and length."""
        return self.gamma * self.n_bar

    @property
    def antinormal_strength(self) -> float:
        """<F F^dag> per unit time and length."""
        return self.gamma * (self.n_bar + 1.0)


# --- raw key-value trees --------------------------------------------------

WAVEGUIDE_KEYS = ("g", "gamma", "v_g", "length", "omega_phonon", "temperature", "n_bar")
PUMP_KEYS = ("intensity", "amplitude", "detuning_scaled", "detuning")


def _number(section: str, key: str, value: Any) -> float:
    try:
        result = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"[{section}] {key}: not a number: {value!r}") from None
    if math.isnan(result):
        raise ConfigError(f"[{section}] {key}: not a number: {value!r}")
    return result


def _pump(raw: Mapping[str, Any], section: str, role: str, gamma: float, length: float) -> PumpChannel:
    unknown = set(raw) - set(PUMP_KEYS)
    if unknown:
        raise ConfigError(f"[{section}] unknown keys: {sorted(unknown)}")
    if "intensity" in raw and "amplitude" in raw:
        raise ConfigError(f"[{section}] give either intensity or amplitude, not both")
    if "intensity" in raw:
        intensity = _number(section, "intensity", raw["intensity"])
    elif "amplitude" in raw:
        amplitude = _number(section, "amplitude", raw["amplitude"])
        intensity = length * amplitude * amplitude
    else:
        raise ConfigError(f"missing required field: [{section}] intensity")
    if "detuning_scaled" in raw and "detuning" in raw:
        raise ConfigError(f"[{section}] give either detuning_scaled or detuning, not both")
    if "detuning_scaled" in raw:
        delta = _number(section, "detuning_scaled", raw["detuning_scaled"])
    elif "detuning" in raw:
        delta = scaled_detuning(_number(section, "detuning", raw["detuning"]), gamma)
    else:
        raise ConfigError(f"missing required field: [{section}] detuning_scaled")
    return PumpChannel(intensity, delta, role)


def validate(raw: Mapping[str, Mapping[str, Any]]) -> tuple[WaveguideParams, DualPumpConfig]:
    """Build validated device and pump objects from a parsed config tree.

    ``raw`` maps section names (``waveguide``, ``pump.upper``, ``pump.lower``)
    to key/value mappings; values may be numbers or numeric strings. A
    missing pump section means that pump is absent (zero intensity).
    """
    if "waveguide" not in raw:
        raise ConfigError("missing required field: [waveguide]")
    wg = raw["waveguide"]
    unknown = set(wg) - set(WAVEGUIDE_KEYS)
    if unknown:
        raise ConfigError(f"[waveguide] unknown keys: {sorted(unknown)}")
    values = {}
    for key in ("g", "gamma", "v_g", "length", "omega_phonon"):
        if key not in wg:
            raise ConfigError(f"missing required field: [waveguide] {key}")
        values[key] = _number("waveguide", key, wg[key])
    temperature = _number("waveguide", "temperature", wg["temperature"]) if "temperature" in wg else None
    n_bar = _number("waveguide", "n_bar", wg["n_bar"]) if "n_bar" in wg else None
    if temperature is None and n_bar is None:
        raise ConfigError("missing required field: [waveguide] temperature or n_bar")
    if temperature is not None and temperature < 0.0:
        raise ConfigError(f"negative temperature: {temperature!r}")
    if temperature is not None:
        # rejects omega <= 0 before it reaches the Bose-Einstein formula
        WaveguideParams(**values)
        derived = thermal_occupation(values["omega_phonon"], temperature)
        if n_bar is None:
            n_bar = derived
        elif not math.isclose(n_bar, derived, rel_tol=_NBAR_RTOL, abs_tol=1e-300):
            raise ConfigError(
                f"temperature/n_bar disagreement: T={temperature!r} K gives n_bar={derived:.6g}, "
                f"config has {n_bar!r}"
            )
    params = WaveguideParams(temperature=temperature, n_bar=n_bar, **values)

    pumps = {}
    for role in (UPPER, LOWER):
        section = f"pump.{role}"
        if section in raw:
            pumps[role] = _pump(raw[section], section, role, params.gamma, params.length)
        else:
            pumps[role] = PumpChannel(0.0, 0.0, role)
    if "pump.upper" not in raw and "pump.lower" not in raw:
        raise ConfigError("missing required field: [pump.upper] or [pump.lower]")
    return params, DualPumpConfig(pumps[UPPER], pumps[LOWER])


def echo(params: WaveguideParams, dual: DualPumpConfig) -> dict[str, dict[str, float]]:
    """Canonical raw tree for ``(params, dual)``; ``validate(echo(...))`` round-trips."""
    wg = {
        "g": params.g,
        "gamma": params.gamma,
        "v_g": params.v_g,
        "length": params.length,
        "omega_phonon": params.omega_phonon,
        "n_bar": params.n_bar,
    }
    if params.temperature is not None:
        wg["temperature"] = params.temperature
    tree = {"waveguide": wg}
    for channel in (dual.upper, dual.lower):
        tree[f"pump.{channel.role}"] = {
            "intensity": channel.intensity,
            "detuning_scaled": channel.detuning_scaled,
        }
    return tree
