"""Pulse-driven two-level quantum dynamics, computed three independent ways.

The package cross-validates a brute-force Schrodinger integrator
(`propagator`), exact special-function solutions (`specfun`, `asymptotics`),
and asymptotic/approximate transfer formulas (`asymptotics`, `lineshape`)
for near-resonant pulsed excitation: populations, phases, detuning
lineshapes, and half-SCRAP superpositions.  The `cli` module exposes the
scenario runner and figure-reproduction harness.
"""

from . import asymptotics, lineshape, propagator, pulses, specfun
from .pulses import Kind, PulseShape, SystemParams

__all__ = [
    "Kind",
    "PulseShape",
    "SystemParams",
    "asymptotics",
    "lineshape",
    "propagator",
    "pulses",
    "specfun",
]
__version__ = "0.1.0"
