"""INI run configuration: parsing, dotted overrides and the canonical echo."""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from . import params as _params
from .design import Budgets
from .errors import ConfigError
from .params import DualPumpConfig, WaveguideParams
from .propagator.grid import PulseSpec

PHYSICS_SECTIONS = ("waveguide", "pump.upper", "pump.lower")

# key -> type for the run-control sections
RUN_SECTIONS: dict[str, dict[str, type]] = {
    "pulse": {"shape": str, "sigma_t": float, "t_center": float, "photon_number": float},
    "grid": {"nz": int, "extra_time": float, "mode": str},
    "mc": {"trajectories": int, "seed": int, "t_obs": float, "snapshot_every": int, "workers": int},
    "budgets": {"max_velocity_ratio": float, "max_abs_GL": float, "max_thermal_out": float, "velocity_tolerance": float},
}

KNOWN_KEYS = {
    "waveguide": set(_params.WAVEGUIDE_KEYS),
    "pump.upper": set(_params.PUMP_KEYS),
    "pump.lower": set(_params.PUMP_KEYS),
    **{name: set(keys) for name, keys in RUN_SECTIONS.items()},
}

DEFAULT_NZ = 20
DEFAULT_MODE = "adiabatic"


@dataclass(frozen=True)
class GridSettings:
    nz: int = DEFAULT_NZ
    extra_time: float = 0.0
    mode: str = DEFAULT_MODE


@dataclass(frozen=True)
class MonteCarloSettings:
    trajectories: int = 0
    seed: int | None = None
    t_obs: float | None = None
    snapshot_every: int | None = None
    workers: int = 1


@dataclass(frozen=True)
class RunConfig:
    raw: dict
    params: WaveguideParams
    pumps: DualPumpConfig
    pulse: PulseSpec
    grid: GridSettings
    mc: MonteCarloSettings
    budgets: Budgets

    def echo(self) -> dict:
        return canonical_echo(self)


def read_tree(path) -> dict[str, dict[str, str]]:
    """Parse an INI file into ``{section: {key: raw string}}``, keeping key case."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    return {name: dict(parser[name]) for name in parser.sections()}


def apply_overrides(tree: Mapping[str, Mapping[str, str]], overrides: Iterable[str]) -> dict[str, dict[str, str]]:
    """Apply ``section.key=value`` strings; the section is everything before the last dot."""
    out = {name: dict(values) for name, values in tree.items()}
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        dotted, value = item.split("=", 1)
        dotted, value = dotted.strip(), value.strip()
        if "." not in dotted:
            raise ConfigError(f"override {item!r} needs a section: section.key=value")
        section, key = dotted.rsplit(".", 1)
        if section not in KNOWN_KEYS or key not in KNOWN_KEYS[section]:
            raise ConfigError(f"unknown override key {dotted!r}")
        out.setdefault(section, {})[key] = value
    return out


def _convert(section: str, key: str, kind: type, value):
    if kind is str:
        return str(value).strip()
    try:
        if kind is int:
            # exact for large seeds, which a float would round
            try:
                return int(str(value).strip())
            except ValueError:
                pass
            number = float(value)
            if not number.is_integer():
                raise ValueError
            return int(number)
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"[{section}] {key}: expected {kind.__name__}, got {value!r}") from None
    if math.isnan(number):
        raise ConfigError(f"[{section}] {key}: not a number")
    return number


def _section(tree, name) -> dict:
    values = tree.get(name, {})
    unknown = set(values) - set(RUN_SECTIONS[name])
    if unknown:
        raise ConfigError(f"[{name}] unknown keys: {sorted(unknown)}")
    return {key: _convert(name, key, RUN_SECTIONS[name][key], v) for key, v in values.items()}


def build(tree: Mapping[str, Mapping[str, str]]) -> RunConfig:
    """Validate a full tree; unknown sections and keys are errors."""
    unknown = set(tree) - set(KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    physics = {name: tree[name] for name in PHYSICS_SECTIONS if name in tree}
    params, pumps = _params.validate(physics)
    try:
        pulse = PulseSpec(**_section(tree, "pulse"))
    except ValueError as exc:
        raise ConfigError(f"[pulse] {exc}") from None
    grid = GridSettings(**_section(tree, "grid"))
    if grid.nz < 1:
        raise ConfigError("[grid] nz must be >= 1")
    if grid.mode not in ("full", "adiabatic"):
        raise ConfigError(f"[grid] mode must be full or adiabatic, got {grid.mode!r}")
    mc = MonteCarloSettings(**_section(tree, "mc"))
    budgets = Budgets(**_section(tree, "budgets"))
    raw = {name: dict(values) for name, values in tree.items()}
    return RunConfig(raw, params, pumps, pulse, grid, mc, budgets)


def load(path, overrides: Iterable[str] = ()) -> RunConfig:
    return build(apply_overrides(read_tree(path), overrides))


def canonical_echo(cfg: RunConfig) -> dict:
    """Fully resolved configuration; equal inputs give equal echoes."""
    tree = _params.echo(cfg.params, cfg.pumps)
    pulse = cfg.pulse
    tree["pulse"] = {
        "shape": pulse.shape,
        "sigma_t": pulse.sigma_t,
        "t_center": pulse.center,
        "photon_number": pulse.photon_number,
    }
    tree["grid"] = {"nz": cfg.grid.nz, "extra_time": cfg.grid.extra_time, "mode": cfg.grid.mode}
    mc = cfg.mc
    tree["mc"] = {
        "trajectories": mc.trajectories,
        "seed": mc.seed,
        "t_obs": mc.t_obs if mc.t_obs is not None else 5.0 / cfg.params.gamma,
        "snapshot_every": mc.snapshot_every,
        "workers": mc.workers,
    }
    b = cfg.budgets
    tree["budgets"] = {
        "max_velocity_ratio": b.max_velocity_ratio,
        "max_abs_GL": b.max_abs_GL,
        "max_thermal_out": b.max_thermal_out,
        "velocity_tolerance": b.velocity_tolerance,
    }
    return tree
