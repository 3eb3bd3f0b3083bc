"""Slow light by stimulated Brillouin scattering in a nanoscale waveguide."""

__version__ = "0.1.0"
