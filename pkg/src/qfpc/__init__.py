"""Quantum friction of a polarizable atom moving parallel to a perfectly
conducting plate at finite temperature."""
from .forces import (
    PRESETS,
    AtomPolarizability,
    ForceBreakdown,
    f_channel,
    f_channels,
    f_value,
    force_si,
    sweep,
    z_of,
)
from .kernels import CHANNELS, Channel, Kinematics, ThermalGeometry
from .quadrature import NonConvergenceError, QuadratureConfig, QuadratureError

__all__ = [
    "PRESETS",
    "AtomPolarizability",
    "ForceBreakdown",
    "f_channel",
    "f_channels",
    "f_value",
    "force_si",
    "sweep",
    "z_of",
    "CHANNELS",
    "Channel",
    "Kinematics",
    "ThermalGeometry",
    "NonConvergenceError",
    "QuadratureConfig",
    "QuadratureError",
]
__version__ = "0.1.0"
