"""Input pulses and the characteristics-aligned space-time grid."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..params import WaveguideParams

GAUSSIAN = "gaussian"
RECTANGULAR = "rectangular"

_GAUSS_SUPPORT = 6.0


@dataclass(frozen=True)
class PulseSpec:
    """Signal injected at ``z = 0``.

    ``gaussian``: intensity ``exp(-(t - t_center)^2 / (2 sigma_t^2))``.
    ``rectangular``: flat amplitude on ``|t - t_center| <= sigma_t``.
    ``photon_number`` is the input density integrated along the guide,
    ``v_g * integral |psi(0, t)|^2 dt``.
    """

    shape: str = GAUSSIAN
    sigma_t: float = 1e-7
    t_center: float | None = None
    photon_number: float = 1.0

    def __post_init__(self):
        if self.shape not in (GAUSSIAN, RECTANGULAR):
            raise ValueError(f"unknown pulse shape {self.shape!r}")
        if not self.sigma_t > 0.0:
            raise ValueError("sigma_t must be > 0")
        if not self.photon_number >= 0.0:
            raise ValueError("photon_number must be >= 0")

    @property
    def center(self) -> float:
        if self.t_center is not None:
            return self.t_center
        return _GAUSS_SUPPORT * self.sigma_t if self.shape == GAUSSIAN else 1.5 * self.sigma_t

    @property
    def end(self) -> float:
        """Time after which the input is negligible (exactly zero for rectangular)."""
        half = _GAUSS_SUPPORT * self.sigma_t if self.shape == GAUSSIAN else self.sigma_t
        return self.center + half

    @property
    def bandwidth(self) -> float:
        return 1.0 / self.sigma_t

    def amplitude(self, t: np.ndarray, v_g: float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.shape == GAUSSIAN:
            shape = np.exp(-((t - self.center) ** 2) / (4.0 * self.sigma_t ** 2))
            norm = self.sigma_t * math.sqrt(2.0 * math.pi)
        else:
            shape = (np.abs(t - self.center) <= self.sigma_t).astype(float)
            norm = 2.0 * self.sigma_t
        peak = math.sqrt(self.photon_number / (v_g * norm))
        return (peak * shape).astype(np.complex128)


@dataclass(frozen=True)
class Grid:
    """``nz`` cells of width ``dz = L / nz`` and ``nt`` steps of ``dt = dz / v_g``.

    Cell ``j`` holds the field at ``z = (j + 1) dz``; the last cell is the output.
    """

    nz: int
    dz: float
    dt: float
    nt: int

    def __post_init__(self):
        if self.nz < 1 or self.nt < 1:
            raise ValueError("grid needs nz >= 1 and nt >= 1")

    @classmethod
    def build(cls, params: WaveguideParams, nz: int, nt: int) -> "Grid":
        dz = params.length / nz
        return cls(int(nz), dz, dz / params.v_g, int(nt))

    @classmethod
    def for_pulse(cls, params: WaveguideParams, pulse: PulseSpec, nz: int, extra_time: float = 0.0) -> "Grid":
        """Grid long enough for the pulse to enter, cross and leave (plus ``extra_time``)."""
        dz = params.length / nz
        dt = dz / params.v_g
        nt = nz + int(math.ceil((pulse.end + extra_time) / dt)) + 1
        return cls(int(nz), dz, dt, nt)

    @classmethod
    def for_duration(cls, params: WaveguideParams, nz: int, duration: float) -> "Grid":
        dz = params.length / nz
        dt = dz / params.v_g
        return cls(int(nz), dz, dt, max(1, int(round(duration / dt))))

    @property
    def duration(self) -> float:
        return self.nt * self.dt

    def z(self) -> np.ndarray:
        return (np.arange(self.nz) + 1.0) * self.dz

    def check(self, params: WaveguideParams) -> None:
        if not math.isclose(self.dz * self.nz, params.length, rel_tol=1e-12):
            raise ValueError(f"grid invariant violated: nz*dz = {self.dz * self.nz!r} != L = {params.length!r}")
        if not math.isclose(params.v_g * self.dt / self.dz, 1.0, rel_tol=1e-12):
            raise ValueError("grid invariant violated: Courant number v_g dt / dz != 1")

    def as_dict(self) -> dict:
        return {"nz": self.nz, "dz": self.dz, "dt": self.dt, "nt": self.nt}


@dataclass
class FieldState:
    """Signal and phonon envelopes (units 1/sqrt(m)) at ``time``; arrays of length ``nz``."""

    psi: np.ndarray
    q_upper: np.ndarray
    q_lower: np.ndarray
    time: float

    def __post_init__(self):
        if not (self.psi.shape == self.q_upper.shape == self.q_lower.shape):
            raise ValueError("field arrays must share a shape")

    @classmethod
    def zeros(cls, nz: int) -> "FieldState":
        z = lambda: np.zeros(nz, dtype=np.complex128)  # noqa: E731
        return cls(z(), z(), z(), 0.0)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2
