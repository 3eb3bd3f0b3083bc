"""Space-time integration of the signal/phonon envelope equations."""

from .grid import FieldState, Grid, PulseSpec
from .kernels import BACKEND
from .meanfield import (
    GroupDelay,
    SimResult,
    measure_group_delay,
    propagate_mean_field,
    propagate_refined,
)
from .thermal import MonteCarloResult, monte_carlo_density, thermal_quadrature

__all__ = [
    "BACKEND",
    "FieldState",
    "Grid",
    "GroupDelay",
    "MonteCarloResult",
    "PulseSpec",
    "SimResult",
    "measure_group_delay",
    "monte_carlo_density",
    "propagate_mean_field",
    "propagate_refined",
    "thermal_quadrature",
]
