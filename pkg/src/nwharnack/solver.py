"""Method-of-lines integration of f_t = Δf + a f - b f^3 with classical RK4.

Positivity is a hypothesis of everything downstream, so it is checked at
every Runge-Kutta stage and never enforced by clipping.
"""

from dataclasses import dataclass
import math
from typing import List, Optional, Union

import numpy as np
from scipy.special import expit

from .errors import InputError, NonFiniteState, NotConverged, PositivityLost
from .field import Field, Grid, lap
from .params import PDEParams


# -- initial conditions --------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    value: float

    def sample(self, grid, pde):
        if not self.value > 0:
            raise InputError(f"constant initial value must be positive, got {self.value!r}")
        return np.full(grid.shape, float(self.value))


@dataclass(frozen=True)
class Equilibrium:
    def sample(self, grid, pde):
        return np.full(grid.shape, pde.equilibrium)


@dataclass(frozen=True)
class SinePerturbed:
    """Equilibrium plus a single Fourier mode (a product of sines in 2D)."""

    amplitude: float
    mode: int = 1

    def sample(self, grid, pde):
        if not 0 <= abs(self.amplitude) < pde.equilibrium:
            raise InputError("sine amplitude must be smaller than the equilibrium value")
        k = 2 * math.pi * self.mode / grid.extent
        wave = np.ones(grid.shape)
        for x in grid.coords():
            wave = wave * np.sin(k * x)
        return pde.equilibrium + self.amplitude * wave


@dataclass(frozen=True)
class GaussianBump:
    center: float
    width: float
    floor: float

    def sample(self, grid, pde):
        if not self.floor > 0 or not self.width > 0:
            raise InputError("gaussian bump needs floor > 0 and width > 0")
        r2 = np.zeros(grid.shape)
        for x in grid.coords():
            d = np.abs(x - self.center) % grid.extent
            d = np.minimum(d, grid.extent - d)
            r2 = r2 + d**2
        return self.floor + pde.equilibrium * np.exp(-r2 / (2 * self.width**2))


@dataclass(frozen=True)
class RandomPositive:
    """Independent uniform samples in [lo, hi] from numpy's seeded PCG64 stream."""

    lo: float
    hi: float
    seed: int = 0

    def sample(self, grid, pde):
        if not 0 < self.lo <= self.hi:
            raise InputError("random initial data needs 0 < lo <= hi")
        rng = np.random.default_rng(self.seed)
        return rng.uniform(self.lo, self.hi, size=grid.shape)


@dataclass(frozen=True)
class Front:
    """Samples of the closed-form traveling front centred at ``center`` (1D)."""

    center: float

    def sample(self, grid, pde):
        if grid.dim != 1:
            raise InputError("front initial data is one-dimensional")
        k = math.sqrt(pde.a / 8)
        # logistic form keeps the far tail positive instead of rounding to 0
        return pde.equilibrium * expit(2 * k * (grid.axis - self.center))


@dataclass(frozen=True)
class Step:
    """``lo`` left of ``center`` and ``hi`` from ``center`` on (1D)."""

    lo: float
    hi: float
    center: float

    def sample(self, grid, pde):
        if grid.dim != 1:
            raise InputError("step initial data is one-dimensional")
        if not (self.lo > 0 and self.hi > 0):
            raise InputError("step levels must be positive")
        return np.where(grid.axis < self.center, float(self.lo), float(self.hi))


InitialCondition = Union[Constant, Equilibrium, SinePerturbed, GaussianBump, RandomPositive, Front, Step]


# -- configuration and results -------------------------------------------------


@dataclass(frozen=True)
class SolverConfig:
    pde: PDEParams
    grid: Grid
    t_end: float
    snapshot_interval: float
    initial_condition: InitialCondition
    cfl_safety: float = 0.4
    dt: Optional[float] = None  # explicit step; must respect the stability limit

    def __post_init__(self):
        if not self.t_end > 0:
            raise InputError(f"t_end must be positive, got {self.t_end!r}")
        if not self.snapshot_interval > 0:
            raise InputError(f"snapshot_interval must be positive, got {self.snapshot_interval!r}")
        if not 0 < self.cfl_safety <= 1:
            raise InputError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety!r}")
        if self.grid.dim != self.pde.n:
            raise InputError(f"grid dim {self.grid.dim} differs from pde n={self.pde.n}")
        if self.dt is not None and not self.dt > 0:
            raise InputError(f"dt must be positive, got {self.dt!r}")


@dataclass
class Trajectory:
    config: SolverConfig
    snapshots: List[Field]
    dt_used: float
    steps: int = 0

    @property
    def times(self):
        return np.array([s.time for s in self.snapshots])

    @property
    def grid(self):
        return self.config.grid

    def index_of(self, t, rtol=1e-9):
        times = self.times
        i = int(np.argmin(np.abs(times - t)))
        if abs(times[i] - t) > rtol * max(1.0, abs(t)):
            raise KeyError(f"no snapshot at t={t!r}")
        return i


# -- time stepping -------------------------------------------------------------


def stable_dt(grid, pde, f_max, cfl_safety=0.4):
    diffusion = grid.h**2 / (2 * grid.dim)
    reaction = 1 / (pde.a + 3 * pde.b * f_max**2)
    return cfl_safety * min(diffusion, reaction)


def rhs(f, pde, h):
    return lap(f, h) + pde.a * f - pde.b * f**3


def _guard(u, t):
    m = u.min()
    if not m > 0:
        if not np.all(np.isfinite(u)):
            raise NonFiniteState(t)
        raise PositivityLost(t, int(np.argmin(u)))


def rk4_step(f, dt, pde, h, t=0.0):
    k1 = rhs(f, pde, h)
    s = f + 0.5 * dt * k1
    _guard(s, t + 0.5 * dt)
    k2 = rhs(s, pde, h)
    s = f + 0.5 * dt * k2
    _guard(s, t + 0.5 * dt)
    k3 = rhs(s, pde, h)
    s = f + dt * k3
    _guard(s, t + dt)
    k4 = rhs(s, pde, h)
    out = f + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    _guard(out, t + dt)
    return out


def _initial(config):
    f0 = config.initial_condition.sample(config.grid, config.pde)
    Field(config.grid, f0).check_positive()
    return f0


def _max_step(config, f0):
    f_max = max(float(f0.max()), config.pde.equilibrium)
    limit = stable_dt(config.grid, config.pde, f_max, config.cfl_safety)
    if config.dt is None:
        return limit
    hard = stable_dt(config.grid, config.pde, f_max, 1.0)
    if config.dt > hard:
        raise InputError(f"dt={config.dt!r} exceeds the stability limit {hard!r}")
    return config.dt


def evolve(config):
    """Integrate to ``t_end``, keeping snapshots at multiples of the interval.

    Each interval is split into equal steps no longer than the stable step,
    so snapshot times are hit exactly.
    """
    pde, grid = config.pde, config.grid
    h = grid.h
    f = _initial(config)
    dt_max = _max_step(config, f)

    n_full = int(math.floor(config.t_end / config.snapshot_interval * (1 + 1e-12)))
    marks = [k * config.snapshot_interval for k in range(1, n_full + 1)]
    if not marks or config.t_end - marks[-1] > 1e-9 * config.t_end:
        marks.append(config.t_end)

    snapshots = [Field(grid, f, 0.0)]
    t = 0.0
    steps = 0
    dt_used = None
    for mark in marks:
        m = max(1, math.ceil((mark - t) / dt_max * (1 - 1e-12)))
        dt = (mark - t) / m
        if dt_used is None:
            dt_used = dt
        for i in range(m):
            f = rk4_step(f, dt, pde, h, t + i * dt)
        steps += m
        t = mark
        snapshots.append(Field(grid, f, t))
    return Trajectory(config, snapshots, dt_used, steps)


def relax_steady(config, tol, t_max):
    """March until max|f_t| <= tol and return the final field.

    Raises :class:`NotConverged` if ``t_max`` is reached first.
    """
    if not tol > 0:
        raise InputError("tol must be positive")
    pde, grid = config.pde, config.grid
    h = grid.h
    f = _initial(config)
    dt = _max_step(config, f)
    t = 0.0
    while True:
        residual = float(np.max(np.abs(rhs(f, pde, h))))
        if residual <= tol:
            return Field(grid, f, t)
        if t >= t_max:
            raise NotConverged(t_max, residual)
        step = min(dt, t_max - t)
        f = rk4_step(f, step, pde, h, t)
        t += step


def scalar_solution(c, t, pde):
    """Exact solution of f' = a f - b f^3 with f(0) = c."""
    e = np.exp(2 * pde.a * t)
    return np.sqrt(pde.a * c**2 * e / (pde.a + pde.b * c**2 * (e - 1)))
