"""Noise-free propagation of a signal pulse through the pumped waveguide."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .. import analytics
from ..errors import NumericalInstabilityError, PulseBandwidthWarning
from ..params import DualPumpConfig, WaveguideParams
from . import kernels
from .grid import FieldState, Grid, PulseSpec

MODES = ("full", "adiabatic")

_CHUNK = 1 << 15


def coefficients(
    params: WaveguideParams,
    pumps: DualPumpConfig,
    grid: Grid,
    mode: str,
    noise_strengths: tuple[float, float] = (0.0, 0.0),
) -> np.ndarray:
    """Pack the per-run constants in the layout the kernels expect.

    ``noise_strengths`` are the delta-correlated strengths driving the upper
    and lower phonons (per unit time and length); they set the standard
    deviation of the exact Ornstein-Uhlenbeck increment per cell and step.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    gamma, dt, dz = params.gamma, grid.dt, grid.dz
    half = 0.5 * gamma
    coef = np.zeros(kernels.N_COEF)
    coef[kernels.C_MODE] = kernels.FULL if mode == "full" else kernels.ADIABATIC
    coef[kernels.C_DT] = dt
    # sqrt(L) g |E| with I = L |E|^2
    coef[kernels.C_CU] = params.g * math.sqrt(pumps.upper.intensity)
    coef[kernels.C_CL] = params.g * math.sqrt(pumps.lower.intensity)
    dw_u = pumps.upper.detuning_scaled * half
    dw_l = pumps.lower.detuning_scaled * half
    coef[kernels.C_DWU] = dw_u
    coef[kernels.C_DWL] = dw_l
    coef[kernels.C_PERU] = 2.0 * math.pi / abs(dw_u) if dw_u else 0.0
    coef[kernels.C_PERL] = 2.0 * math.pi / abs(dw_l) if dw_l else 0.0
    coef[kernels.C_DECAY] = math.exp(-half * dt)
    coef[kernels.C_DRIVE] = -math.expm1(-half * dt) / half
    s_u, s_l = noise_strengths
    ou = -math.expm1(-gamma * dt) / (gamma * dz)
    coef[kernels.C_SDU] = math.sqrt(s_u * ou)
    coef[kernels.C_SDL] = math.sqrt(s_l * ou)
    gain, kappa = analytics.dual_rates(
        params,
        pumps.upper.intensity,
        pumps.upper.detuning_scaled,
        pumps.lower.intensity,
        pumps.lower.detuning_scaled,
    )
    x = complex(gain, -kappa) * dz
    factor = (1.0 + 0.5 * x) / (1.0 - 0.5 * x)
    coef[kernels.C_FRE] = factor.real
    coef[kernels.C_FIM] = factor.imag
    return coef


@dataclass
class SimResult:
    times: np.ndarray
    output: np.ndarray
    input_times: np.ndarray
    input: np.ndarray
    measured_gain: float
    measured_delay: float
    measured_velocity_ratio: float
    grid: Grid
    mode: str
    length: float
    v_g: float
    final_state: FieldState | None = None
    density_map: np.ndarray | None = None
    map_times: np.ndarray | None = None
    noise_floor: float | None = None
    error_bars: dict = field(default_factory=dict)

    @property
    def output_series(self) -> np.ndarray:
        """Signal density at ``z = L`` against :attr:`times`, photons per metre."""
        return np.abs(self.output) ** 2

    @property
    def input_series(self) -> np.ndarray:
        return np.abs(self.input) ** 2


@dataclass(frozen=True)
class GroupDelay:
    delay: float
    velocity_ratio: float


def centroid(times: np.ndarray, density: np.ndarray) -> float:
    total = float(np.sum(density))
    if not total > 0.0:
        raise ValueError("centroid undefined: zero-energy series")
    return float(np.sum(times * density)) / total


def _energy(series: np.ndarray, dt: float) -> float:
    return float(np.sum(series)) * dt


def run_kernel(psi, q_u, q_l, n0, inp, coef, noise_u=None, noise_l=None, backend=None):
    """Advance state arrays in place through ``len(inp)`` steps; return the output block."""
    batch, nz = psi.shape
    out = np.empty((batch, inp.shape[0]), dtype=np.complex128)
    nu = kernels.empty_noise(batch, nz) if noise_u is None else noise_u
    nl = kernels.empty_noise(batch, nz) if noise_l is None else noise_l
    kernels.get_advance(backend)(psi, q_u, q_l, n0, inp, nu, nl, out, coef)
    if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(out))):
        raise NumericalInstabilityError(
            f"non-finite field after step {n0 + inp.shape[0]} (dt={coef[kernels.C_DT]:.3g} s)"
        )
    return out


def propagate_mean_field(
    params: WaveguideParams,
    pumps: DualPumpConfig,
    pulse: PulseSpec,
    grid: Grid,
    mode: str = "adiabatic",
    record_every: int | None = None,
    backend: str | None = None,
) -> SimResult:
    """Integrate the first-moment equations for one input pulse.

    ``full`` keeps both phonon fields as dynamical variables; ``adiabatic``
    replaces them by their eliminated steady state. The measured gain is
    ``ln(E_out / E_in) / (2 L)`` with ``E`` the time-integrated density, and
    the measured delay is the shift of the density centroid from ``z = 0``
    to ``z = L``. With ``record_every`` the density profile is stored every
    that many steps.
    """
    grid.check(params)
    if mode == "adiabatic" and pulse.bandwidth >= params.gamma / 10.0:
        warnings.warn(
            f"pulse bandwidth {pulse.bandwidth:.3g} rad/s is not below gamma/10 = {params.gamma / 10:.3g}",
            PulseBandwidthWarning,
            stacklevel=2,
        )
    coef = coefficients(params, pumps, grid, mode)
    nz, nt, dt = grid.nz, grid.nt, grid.dt
    psi = np.zeros((1, nz), dtype=np.complex128)
    q_u = np.zeros_like(psi)
    q_l = np.zeros_like(psi)
    in_times = np.arange(nt) * dt
    inp = pulse.amplitude(in_times, params.v_g)
    output = np.empty(nt, dtype=np.complex128)
    step = record_every if record_every else _CHUNK
    snaps, snap_times = [], []
    n0 = 0
    while n0 < nt:
        n = min(step, nt - n0)
        output[n0:n0 + n] = run_kernel(psi, q_u, q_l, n0, inp[n0:n0 + n], coef, backend=backend)[0]
        n0 += n
        if record_every:
            snaps.append(np.abs(psi[0]) ** 2)
            snap_times.append(n0 * dt)
    times = (np.arange(nt) + 1.0) * dt

    # only input samples that can reach z = L inside the run
    reach = max(nt - nz + 1, 1)
    in_dens = np.abs(inp[:reach]) ** 2
    out_dens = np.abs(output) ** 2
    e_in = _energy(in_dens, dt)
    e_out = _energy(out_dens, dt)
    gain = math.log(e_out / e_in) / (2.0 * params.length) if e_in > 0.0 and e_out > 0.0 else math.nan
    try:
        delay = centroid(times, out_dens) - centroid(in_times[:reach], in_dens)
    except ValueError:
        delay = math.nan
    ratio = params.length / (params.v_g * delay) if delay and math.isfinite(delay) else math.nan
    state = FieldState(psi[0].copy(), q_u[0].copy(), q_l[0].copy(), nt * dt)
    return SimResult(
        times=times,
        output=output,
        input_times=in_times,
        input=inp,
        measured_gain=gain,
        measured_delay=delay,
        measured_velocity_ratio=ratio,
        grid=grid,
        mode=mode,
        length=params.length,
        v_g=params.v_g,
        final_state=state,
        density_map=np.array(snaps) if record_every else None,
        map_times=np.array(snap_times) if record_every else None,
    )


def measure_group_delay(result: SimResult, reference: SimResult) -> GroupDelay:
    """Extra delay of ``result`` over a coupling-free ``reference`` on the same grid."""
    if result.grid != reference.grid:
        raise ValueError("result and reference must share a grid")
    delay = centroid(result.times, result.output_series) - centroid(reference.times, reference.output_series)
    return GroupDelay(delay, 1.0 / (1.0 + result.v_g * delay / result.length))


def propagate_refined(
    params: WaveguideParams,
    pumps: DualPumpConfig,
    pulse: PulseSpec,
    nz: int,
    mode: str = "adiabatic",
    backend: str | None = None,
) -> SimResult:
    """Run at ``nz`` and ``2 nz``; return the finer run with grid-pair error bars."""
    coarse = propagate_mean_field(params, pumps, pulse, Grid.for_pulse(params, pulse, nz), mode, backend=backend)
    fine = propagate_mean_field(params, pumps, pulse, Grid.for_pulse(params, pulse, 2 * nz), mode, backend=backend)
    bars = {
        name: abs(getattr(fine, name) - getattr(coarse, name))
        for name in ("measured_gain", "measured_delay", "measured_velocity_ratio")
    }
    return replace(fine, error_bars=bars)
