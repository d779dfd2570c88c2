"""Uniform periodic grids, positive fields and second-order stencils.

The torus [0, L)^dim stands in for R^n: a positive periodic solution extends
periodically to a positive solution on the whole space. Every operator is a
central difference with periodic wrap, so each is O(h^2) and exact on
constants.
"""

from dataclasses import dataclass, field as dc_field
import math

import numpy as np

from .errors import InputError, NonPositiveSample


@dataclass(frozen=True)
class Grid:
    dim: int
    points: int
    extent: float

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise InputError(f"grid dim must be 1 or 2, got {self.dim!r}")
        if int(self.points) != self.points or self.points < 8:
            raise InputError(f"points per axis must be an integer >= 8, got {self.points!r}")
        if not (math.isfinite(self.extent) and self.extent > 0):
            raise InputError(f"extent must be positive, got {self.extent!r}")
        object.__setattr__(self, "points", int(self.points))
        object.__setattr__(self, "extent", float(self.extent))

    @property
    def h(self):
        return self.extent / self.points

    @property
    def shape(self):
        return (self.points,) * self.dim

    @property
    def axis(self):
        return np.arange(self.points) * self.h

    def coords(self):
        """Node coordinates, one array per axis, each shaped like the grid."""
        if self.dim == 1:
            return (self.axis,)
        return tuple(np.meshgrid(self.axis, self.axis, indexing="ij"))

    def node_position(self, node):
        idx = np.unravel_index(node, self.shape)
        return np.array([i * self.h for i in idx])

    def min_image_distance(self, x1, x2):
        d = np.abs(np.asarray(x2, float) - np.asarray(x1, float)) % self.extent
        d = np.minimum(d, self.extent - d)
        return float(np.sqrt(np.sum(d**2)))


@dataclass(frozen=True, eq=False)
class Field:
    grid: Grid
    samples: np.ndarray = dc_field(repr=False)
    time: float = 0.0

    def __post_init__(self):
        arr = np.array(self.samples, dtype=float)
        if arr.shape != self.grid.shape:
            raise InputError(f"samples shape {arr.shape} does not match grid {self.grid.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def with_samples(self, samples):
        return Field(self.grid, samples, self.time)

    def check_positive(self):
        bad = np.flatnonzero(~(self.samples > 0))
        if bad.size:
            node = int(bad[0])
            raise NonPositiveSample(node, float(self.samples.flat[node]))
        return self


# -- array stencils ------------------------------------------------------------
# These take raw arrays plus spacing so that hot loops (time stepping, Harnack
# evaluation) avoid wrapping every intermediate in a Field.


def lap(u, h):
    out = np.zeros_like(u)
    for ax in range(u.ndim):
        out += np.roll(u, 1, ax) - 2 * u + np.roll(u, -1, ax)
    return out / h**2


def grad(u, h):
    return [(np.roll(u, -1, ax) - np.roll(u, 1, ax)) / (2 * h) for ax in range(u.ndim)]


def grad_sq(u, h):
    return sum(g * g for g in grad(u, h))


def dot_grad(u, v, h):
    return sum(gu * gv for gu, gv in zip(grad(u, h), grad(v, h)))


def hessian_sq(u, h):
    """Squared Frobenius norm of the discrete Hessian."""
    total = np.zeros_like(u)
    for ax in range(u.ndim):
        d2 = (np.roll(u, 1, ax) - 2 * u + np.roll(u, -1, ax)) / h**2
        total += d2 * d2
    if u.ndim == 2:
        pp = np.roll(np.roll(u, -1, 0), -1, 1)
        pm = np.roll(np.roll(u, -1, 0), 1, 1)
        mp = np.roll(np.roll(u, 1, 0), -1, 1)
        mm = np.roll(np.roll(u, 1, 0), 1, 1)
        dxy = (pp - pm - mp + mm) / (4 * h**2)
        total += 2 * dxy * dxy
    return total


def bochner(u, h):
    """Δ|∇u|^2 - 2 ∇u·∇Δu - 2|∇∇u|^2 on raw arrays."""
    return lap(grad_sq(u, h), h) - 2 * dot_grad(u, lap(u, h), h) - 2 * hessian_sq(u, h)


# -- Field operations --------------------------------------------------------


def log_field(f):
    f.check_positive()
    return f.with_samples(np.log(f.samples))


def laplacian(u):
    return u.with_samples(lap(u.samples, u.grid.h))


def gradient_sq(u):
    return u.with_samples(grad_sq(u.samples, u.grid.h))


def bochner_residual(l):
    return l.with_samples(bochner(l.samples, l.grid.h))


def max_norm(u):
    arr = u.samples if isinstance(u, Field) else np.asarray(u)
    return float(np.max(np.abs(arr)))


def convergence_order(hs, errors):
    """Least-squares slope of log(error) against log(h)."""
    slope, _ = np.polyfit(np.log(hs), np.log(errors), 1)
    return float(slope)


# -- snapshot files ------------------------------------------------------------


def write_snapshot(path, f):
    with open(path, "w") as fh:
        fh.write(f"# t={f.time:.17g} dim={f.grid.dim} N={f.grid.points} L={f.grid.extent:.17g}\n")
        for value in f.samples.ravel():
            fh.write(f"{value:.17g}\n")


def read_snapshot(path):
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise InputError(f"{path}: missing snapshot header")
        meta = dict(item.split("=", 1) for item in header[1:].split())
        grid = Grid(int(meta["dim"]), int(meta["N"]), float(meta["L"]))
        values = np.array([float(line) for line in fh if line.strip()])
    return Field(grid, values.reshape(grid.shape), float(meta["t"]))
