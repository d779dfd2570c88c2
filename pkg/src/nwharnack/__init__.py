"""Numerical checks of a differential Harnack estimate for f_t = Δf + a f - b f^3."""

from .params import Branch, GaugeConstants, HarnackParams, PDEParams, gauge_constants, preset, switch_time, validate
from .gauge import TimeGauge
from .field import Field, Grid
from .solver import SolverConfig, Trajectory, evolve, relax_steady

__version__ = "0.1.0"
