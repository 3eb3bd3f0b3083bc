"""Closed-form steady-state response of the signal to one or two pumps.

With the phonon adiabatically eliminated, the upper pump contributes
``(G_u - i kappa_u)`` and the lower pump ``-(G_l + i kappa_l)`` to the local
propagation rate of the signal envelope. The core helpers accept numpy
arrays so sweeps and frequency-domain checks can evaluate them in bulk.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ExpansionValidityWarning, UnstableRegimeError
from .params import LOWER, UPPER, DualPumpConfig, PumpChannel, WaveguideParams

AMPLIFYING = "amplifying"
ATTENUATING = "attenuating"
BALANCED = "balanced"

_BALANCE_RTOL = 1e-12
_SERIES_CUTOFF = 1e-6


# --- array cores -----------------------------------------------------------

def lorentz_gain(g, gamma, v_g, intensity, delta):
    """``2 g^2 I / (v_g gamma (1 + delta^2))``, 1/m."""
    return 2.0 * g * g / (v_g * gamma) * intensity / (1.0 + delta * delta)


def lorentz_shift(g, gamma, v_g, intensity, delta):
    """``2 g^2 delta I / (gamma v_g (1 + delta^2))``, 1/m."""
    return 2.0 * g * g / (gamma * v_g) * delta * intensity / (1.0 + delta * delta)


def dispersion_term(g, gamma, intensity, delta):
    """``4 g^2 I (1 - delta^2) / (gamma^2 (1 + delta^2)^2)``."""
    d2 = delta * delta
    return 4.0 * g * g / (gamma * gamma) * intensity * (1.0 - d2) / ((1.0 + d2) ** 2)


def slope_term(g, gamma, v_g, intensity, delta):
    """``8 g^2 I delta / (v_g gamma^2 (1 + delta^2)^2)``, s/m."""
    d2 = delta * delta
    return 8.0 * g * g / (v_g * gamma * gamma) * intensity * delta / ((1.0 + d2) ** 2)


def growth_length(gain, z):
    """``(exp(2 G z) - 1) / (2 G)`` with the ``G -> 0`` limit taken by series."""
    gain = np.asarray(gain, dtype=float)
    z = np.asarray(z, dtype=float)
    x = 2.0 * gain * z
    small = np.abs(x) < _SERIES_CUTOFF
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = np.expm1(x) / (2.0 * gain)
    out = np.where(small, z * (1.0 + gain * z), exact)
    return out if out.ndim else float(out)


def dual_rates(params: WaveguideParams, intensity_u, delta_u, intensity_l, delta_l):
    """Net gain and wavenumber shift ``(G, kappa)`` for arrays of pump settings."""
    g, gamma, v_g = params.g, params.gamma, params.v_g
    gain = lorentz_gain(g, gamma, v_g, intensity_u, delta_u) - lorentz_gain(g, gamma, v_g, intensity_l, delta_l)
    kappa = lorentz_shift(g, gamma, v_g, intensity_u, delta_u) + lorentz_shift(g, gamma, v_g, intensity_l, delta_l)
    return gain, kappa


def dual_velocity_denominator(params: WaveguideParams, intensity_u, delta_u, intensity_l, delta_l):
    g, gamma = params.g, params.gamma
    return 1.0 + dispersion_term(g, gamma, intensity_u, delta_u) - dispersion_term(g, gamma, intensity_l, delta_l)


def _ratio(denominator, strict: bool):
    if denominator <= 0.0:
        value = math.inf if denominator == 0.0 else 1.0 / denominator
        if strict:
            raise UnstableRegimeError(
                f"superluminal/unstable regime: velocity denominator {denominator:.6g} <= 0", value
            )
        return value
    return 1.0 / denominator


# --- single channel --------------------------------------------------------

def gain_single(params: WaveguideParams, channel: PumpChannel) -> float:
    """Gain (upper) or loss (lower) magnitude per unit length, 1/m."""
    return lorentz_gain(params.g, params.gamma, params.v_g, channel.intensity, channel.detuning_scaled)


def wavenumber_shift_single(params: WaveguideParams, channel: PumpChannel) -> float:
    return lorentz_shift(params.g, params.gamma, params.v_g, channel.intensity, channel.detuning_scaled)


def effective_velocity_single(params: WaveguideParams, channel: PumpChannel, strict: bool = True) -> float:
    """``v_e / v_g`` for one pump.

    The lower channel enters with the opposite sign and can drive the
    denominator through zero near ``|delta| < 1``; with ``strict`` this raises
    :class:`UnstableRegimeError`, otherwise the signed ratio is returned.
    """
    term = dispersion_term(params.g, params.gamma, channel.intensity, channel.detuning_scaled)
    sign = 1.0 if channel.role == UPPER else -1.0
    return _ratio(1.0 + sign * term, strict)


def gain_slope_single(params: WaveguideParams, channel: PumpChannel) -> float:
    """Derivative of :func:`gain_single` with respect to the signal frequency, s/m."""
    term = slope_term(params.g, params.gamma, params.v_g, channel.intensity, channel.detuning_scaled)
    return term if channel.role == UPPER else -term


# --- dual pump ---------------------------------------------------------------

@dataclass(frozen=True)
class ResponseSummary:
    gain_per_length: float
    kappa: float
    velocity_ratio: float
    gain_slope: float
    regime: str

    def gain_times_length(self, length: float) -> float:
        return self.gain_per_length * length


def _regime(gain: float, g_u: float, g_l: float) -> str:
    if abs(gain) <= _BALANCE_RTOL * max(g_u, g_l):
        return BALANCED
    return AMPLIFYING if gain > 0.0 else ATTENUATING


def dual_response(params: WaveguideParams, dual: DualPumpConfig, strict: bool = True) -> ResponseSummary:
    up, lo = dual.upper, dual.lower
    g_u = gain_single(params, up)
    g_l = gain_single(params, lo)
    gain = g_u - g_l
    kappa = wavenumber_shift_single(params, up) + wavenumber_shift_single(params, lo)
    denom = dual_velocity_denominator(params, up.intensity, up.detuning_scaled, lo.intensity, lo.detuning_scaled)
    ratio = _ratio(denom, strict)
    slope = slope_term(params.g, params.gamma, params.v_g, up.intensity, up.detuning_scaled) + slope_term(
        params.g, params.gamma, params.v_g, lo.intensity, lo.detuning_scaled
    )
    return ResponseSummary(gain, kappa, ratio, slope, _regime(gain, g_u, g_l))


# --- thermal contributions ---------------------------------------------------

@dataclass(frozen=True)
class ThermalDensity:
    """Noise photons per metre at ``(z, t)``; ``photon_number`` is ``value * L``."""

    value: float
    photon_number: float
    channel: str


def _check_zt(params, z, t):
    if z < 0.0 or z > params.length * (1.0 + 1e-12):
        raise ValueError(f"z={z!r} outside [0, L]")
    if t < 0.0:
        raise ValueError(f"t={t!r} must be >= 0")


def thermal_density_single(params: WaveguideParams, channel: PumpChannel, z: float, t: float) -> ThermalDensity:
    _check_zt(params, z, t)
    gain = gain_single(params, channel)
    if channel.role == UPPER:
        weight = params.n_bar + 1.0
        net = gain
    else:
        weight = params.n_bar
        net = -gain
    prefactor = params.g ** 2 * channel.intensity * weight / params.v_g ** 2
    value = prefactor * -math.expm1(-params.gamma * t) * growth_length(net, z)
    return ThermalDensity(value, value * params.length, channel.role)


def _dual_weight(params: WaveguideParams, dual: DualPumpConfig) -> float:
    return dual.lower.intensity * params.n_bar + dual.upper.intensity * (params.n_bar + 1.0)


def thermal_density_dual(params: WaveguideParams, dual: DualPumpConfig, z: float, t: float) -> ThermalDensity:
    _check_zt(params, z, t)
    gain = gain_single(params, dual.upper) - gain_single(params, dual.lower)
    prefactor = params.g ** 2 * _dual_weight(params, dual) / params.v_g ** 2
    value = prefactor * -math.expm1(-params.gamma * t) * growth_length(gain, z)
    return ThermalDensity(value, value * params.length, "dual")


def thermal_out_density(params: WaveguideParams, dual: DualPumpConfig) -> float:
    """Output noise density at ``z = L`` after one transit, 1/m (small ``GL``, ``gamma L / v_g``)."""
    return params.g ** 2 * params.gamma * params.length ** 2 / params.v_g ** 3 * _dual_weight(params, dual)


def thermal_out(params: WaveguideParams, dual: DualPumpConfig) -> float:
    """Noise photon number at the output, density times ``L``.

    Warns with :class:`ExpansionValidityWarning` when ``gamma L / v_g`` or
    ``|G| L`` exceeds 0.1.
    """
    transit = params.gamma * params.length / params.v_g
    gl = abs(gain_single(params, dual.upper) - gain_single(params, dual.lower)) * params.length
    if transit > 0.1:
        warnings.warn(f"gamma L / v_g = {transit:.3g} is not small", ExpansionValidityWarning, stacklevel=2)
    if gl > 0.1:
        warnings.warn(f"|G| L = {gl:.3g} is not small", ExpansionValidityWarning, stacklevel=2)
    return thermal_out_density(params, dual) * params.length


__all__ = [
    "AMPLIFYING",
    "ATTENUATING",
    "BALANCED",
    "LOWER",
    "UPPER",
    "ResponseSummary",
    "ThermalDensity",
    "dual_response",
    "effective_velocity_single",
    "gain_single",
    "gain_slope_single",
    "growth_length",
    "thermal_density_dual",
    "thermal_density_single",
    "thermal_out",
    "thermal_out_density",
    "wavenumber_shift_single",
]
