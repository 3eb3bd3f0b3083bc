"""Thermal noise floor: deterministic quadrature and a seeded Monte-Carlo sampler."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import analytics
from ..errors import NumericalInstabilityError
from ..params import DualPumpConfig, WaveguideParams
from .grid import Grid
from .meanfield import coefficients, run_kernel

_NOISE_CHUNK = 4096


def _bath_weight(params: WaveguideParams, pumps: DualPumpConfig) -> float:
    """``[gamma (n_bar + 1) c_u^2 + gamma n_bar c_l^2] / v_g^2`` with ``c^2 = g^2 I``."""
    noise = params.noise
    c2_u = params.g ** 2 * pumps.upper.intensity
    c2_l = params.g ** 2 * pumps.lower.intensity
    return (noise.antinormal_strength * c2_u + noise.normal_strength * c2_l) / params.v_g ** 2


def thermal_quadrature(
    params: WaveguideParams,
    pumps: DualPumpConfig,
    z: float,
    t_obs: float,
    n_z: int = 2000,
    n_t: int = 2000,
) -> float:
    """Noise photon density (1/m) at ``(z, t_obs)`` by 2-D trapezoidal quadrature.

    Integrates ``exp(-gamma (t - t')) exp(2 G (z - z'))`` over ``0 <= z' <= z``,
    ``0 <= t' <= t_obs`` against the delta-correlated bath strengths:
    ``gamma (n_bar + 1)`` feeding the upper channel and ``gamma n_bar`` the lower.
    """
    if t_obs < 0.0:
        raise ValueError(f"t_obs={t_obs!r} must be >= 0")
    if not 0.0 <= z <= params.length * (1.0 + 1e-12):
        raise ValueError(f"z={z!r} outside [0, L]")
    weight = _bath_weight(params, pumps)
    if weight == 0.0 or z == 0.0 or t_obs == 0.0:
        return 0.0
    gain, _ = analytics.dual_rates(
        params,
        pumps.upper.intensity,
        pumps.upper.detuning_scaled,
        pumps.lower.intensity,
        pumps.lower.detuning_scaled,
    )
    zp = np.linspace(0.0, z, n_z)
    tp = np.linspace(0.0, t_obs, n_t)
    kernel = np.exp(-params.gamma * (t_obs - tp))[None, :] * np.exp(2.0 * gain * (z - zp))[:, None]
    inner = np.trapezoid(kernel, tp, axis=1)
    return float(weight * np.trapezoid(inner, zp))


@dataclass
class MonteCarloResult:
    times: np.ndarray
    z: np.ndarray
    mean: np.ndarray
    standard_error: np.ndarray
    trajectories: int
    seed: int
    grid: Grid

    @property
    def output_density(self) -> float:
        """Mean noise density at ``z = L`` at the last snapshot, 1/m."""
        return float(self.mean[-1, -1])

    @property
    def output_error(self) -> float:
        return float(self.standard_error[-1, -1])


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for trajectory ``index``; independent of scheduling."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(index,))))


def _circular(rng: np.random.Generator, shape) -> np.ndarray:
    x = rng.standard_normal(shape + (2,))
    return (x[..., 0] + 1j * x[..., 1]) * math.sqrt(0.5)


def _trajectory(index, seed, coef, grid, use_u, use_l, snapshot_every, backend):
    rng = trajectory_rng(seed, index)
    nz, nt = grid.nz, grid.nt
    psi = np.zeros((1, nz), dtype=np.complex128)
    q_u = np.zeros_like(psi)
    q_l = np.zeros_like(psi)
    inp = np.zeros(min(_NOISE_CHUNK, nt), dtype=np.complex128)
    snaps = []
    n0 = 0
    while n0 < nt:
        n = min(_NOISE_CHUNK, nt - n0, snapshot_every - n0 % snapshot_every)
        noise_u = _circular(rng, (1, n, nz)) if use_u else None
        noise_l = _circular(rng, (1, n, nz)) if use_l else None
        run_kernel(psi, q_u, q_l, n0, inp[:n], coef, noise_u, noise_l, backend)
        n0 += n
        if n0 % snapshot_every == 0 or n0 == nt:
            snaps.append(np.abs(psi[0]) ** 2)
    return np.array(snaps)


def monte_carlo_density(
    params: WaveguideParams,
    pumps: DualPumpConfig,
    grid: Grid,
    trajectories: int,
    seed: int,
    mode: str = "adiabatic",
    snapshot_every: int | None = None,
    workers: int = 1,
    backend: str | None = None,
) -> MonteCarloResult:
    """Ensemble noise density from ``trajectories`` noise-driven runs with no input.

    Each phonon channel gets an independent complex circular Gaussian stream,
    applied as the exact Ornstein-Uhlenbeck increment of the bath: strength
    ``gamma (n_bar + 1)`` on the upper channel, ``gamma n_bar`` on the lower.
    Trajectory ``m`` draws from its own stream derived from ``(seed, m)`` and
    results are reduced in trajectory order, so ``workers`` does not change
    the output. Snapshots are taken every ``snapshot_every`` steps (default:
    only at the end of the grid).
    """
    if trajectories < 2:
        raise ValueError(f"need at least 2 trajectories, got {trajectories}")
    grid.check(params)
    noise = params.noise
    strengths = (noise.antinormal_strength, noise.normal_strength)
    coef = coefficients(params, pumps, grid, mode, strengths)
    use_u = pumps.upper.intensity > 0.0 and strengths[0] > 0.0
    use_l = pumps.lower.intensity > 0.0 and strengths[1] > 0.0
    every = snapshot_every or grid.nt
    args = (seed, coef, grid, use_u, use_l, every, backend)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            maps = list(pool.map(lambda m: _trajectory(m, *args), range(trajectories)))
    else:
        maps = [_trajectory(m, *args) for m in range(trajectories)]
    stack = np.stack(maps)
    if not np.all(np.isfinite(stack)):
        raise NumericalInstabilityError("non-finite sample in Monte-Carlo ensemble")
    mean = stack.mean(axis=0)
    se = stack.std(axis=0, ddof=1) / math.sqrt(trajectories)
    snap_steps = np.minimum(np.arange(1, mean.shape[0] + 1) * every, grid.nt)
    return MonteCarloResult(snap_steps * grid.dt, grid.z(), mean, se, trajectories, seed, grid)
