"""Harnack quantity on simulated solutions and the checks built on it.

``H = alpha Δl + beta |∇l|^2 + gamma e^{2l} + gauge(t)`` with ``l = log f`` is
evaluated with the stencils from :mod:`nwharnack.field`. The gauge depends on
time only, so its spatial derivatives vanish in every identity below.
"""

from dataclasses import dataclass, field as dc_field
import math
from typing import List, Sequence

import numpy as np
from scipy.integrate import simpson

from .errors import BadTimeOrder, InputError, NonPositiveTime, QueryOffGrid
from .field import Grid, dot_grad, grad_sq, hessian_sq, lap
from .gauge import TimeGauge
from .params import preset
from .solver import rhs


@dataclass(frozen=True, eq=False)
class HarnackField:
    grid: Grid
    time: float
    values: np.ndarray = dc_field(repr=False)
    params: object = None

    @property
    def min(self):
        return float(self.values.min())

    @property
    def argmin(self):
        return int(np.argmin(self.values))


def _positive_log(f):
    f.check_positive()
    return np.log(f.samples)


def _check_time(t):
    if not t > 0:
        raise NonPositiveTime(f"Harnack quantity needs t > 0, got {t!r}")


def _core(f, h, p):
    """H minus the gauge, on raw arrays."""
    l = np.log(f)
    return p.alpha * lap(l, h) + p.beta * grad_sq(l, h) + p.gamma * f * f


def harnack_field(f, t, p, g):
    _check_time(t)
    _positive_log(f)
    values = _core(f.samples, f.grid.h, p) + g(t)
    return HarnackField(f.grid, t, values, p)


def harnack_field_fform(f, p, g, t):
    """Same quantity written through f: uses f_t from the right-hand side."""
    _check_time(t)
    _positive_log(f)
    u, h = f.samples, f.grid.h
    a, b = p.pde.a, p.pde.b
    ft = rhs(u, p.pde, h)
    values = (
        p.alpha * ft / u
        - p.alpha * a
        + (p.beta - p.alpha) * grad_sq(u, h) / u**2
        + (p.gamma + p.alpha * b) * u**2
        + g(t)
    )
    return HarnackField(f.grid, t, values, p)


# -- certification -------------------------------------------------------------


@dataclass(frozen=True)
class SnapshotRecord:
    t: float
    min_h: float
    argmin: int
    gauge: float


@dataclass(frozen=True)
class Violation:
    t: float
    node: int
    value: float


@dataclass
class HarnackReport:
    records: List[SnapshotRecord]
    violations: List[Violation]
    tolerance: float

    @property
    def passed(self):
        return not self.violations

    @property
    def min_h(self):
        return min(r.min_h for r in self.records)

    @property
    def worst_negative(self):
        """Largest negative excursion of H (0 when H never dips below 0)."""
        return max(0.0, -self.min_h)


def certify(traj, p, t_min, tolerance, g=None):
    """Evaluate H on every snapshot at or after ``t_min`` and collect violations."""
    if not t_min > 0:
        raise NonPositiveTime("t_min must be positive to avoid the gauge singularity")
    if not tolerance > 0:
        raise InputError("tolerance must be positive")
    g = g or TimeGauge.for_params(p)
    records, violations = [], []
    for snap in traj.snapshots:
        if snap.time < t_min:
            continue
        hf = harnack_field(snap, snap.time, p, g)
        records.append(SnapshotRecord(snap.time, hf.min, hf.argmin, g(snap.time)))
        for node in np.flatnonzero(hf.values.ravel() < -tolerance):
            violations.append(Violation(snap.time, int(node), float(hf.values.flat[node])))
    return HarnackReport(records, violations, tolerance)


# -- evolution identities ------------------------------------------------------


def _time_derivative(q_prev, q_mid, q_next, dt_back, dt_fwd):
    # three-point central difference, second order for unequal spacing
    return (
        dt_back**2 * q_next - dt_fwd**2 * q_prev + (dt_fwd**2 - dt_back**2) * q_mid
    ) / (dt_back * dt_fwd * (dt_back + dt_fwd))


def _neighbours(traj, k):
    if not 1 <= k < len(traj.snapshots) - 1:
        raise IndexError(f"snapshot {k} needs neighbours on both sides")
    s0, s1, s2 = traj.snapshots[k - 1 : k + 2]
    return s0, s1, s2, s1.time - s0.time, s2.time - s1.time


@dataclass(frozen=True, eq=False)
class EvolutionResiduals:
    laplacian: np.ndarray
    gradient_sq: np.ndarray
    exp2l: np.ndarray
    scale: float  # largest max-norm among the three right-hand sides


def evolution_residuals(traj, k):
    """Residuals of the heat-operator identities for Δl, |∇l|^2 and e^{2l}."""
    s0, s1, s2, db, df = _neighbours(traj, k)
    h = traj.grid.h
    pde = traj.config.pde
    a, b = pde.a, pde.b

    def parts(u):
        l = np.log(u)
        return l, lap(l, h), grad_sq(l, h), u * u

    l0, dl0, g0, e0 = parts(s0.samples)
    l, dl, g, e = parts(s1.samples)
    l2, dl2, g2, e2 = parts(s2.samples)

    box = lambda q0, q1, q2: _time_derivative(q0, q1, q2, db, df) - lap(q1, h)

    rhs_lap = lap(g, h) - 2 * b * dl * e - 4 * b * g * e
    rhs_grad = 2 * dot_grad(l, dl, h) + 2 * dot_grad(l, g, h) - 4 * b * g * e - lap(g, h)
    rhs_exp = 2 * dot_grad(l, e, h) + 2 * a * e - 2 * b * e * e - 6 * g * e

    scale = max(float(np.abs(r).max()) for r in (rhs_lap, rhs_grad, rhs_exp))
    return EvolutionResiduals(
        box(dl0, dl, dl2) - rhs_lap,
        box(g0, g, g2) - rhs_grad,
        box(e0, e, e2) - rhs_exp,
        scale,
    )


def lemma_residuals(traj, k, p, g=None):
    """Return (identity residual, inequality slack) of the heat operator on H.

    The identity residual should be O(h^2); the slack is nonnegative in the
    continuum because |∇∇l|^2 >= (Δl)^2 / n.
    """
    g = g or TimeGauge.for_params(p)
    s0, s1, s2, db, df = _neighbours(traj, k)
    t = s1.time
    _check_time(t)
    h = traj.grid.h
    a, b, n = p.pde.a, p.pde.b, p.pde.n
    al, be, ga = p.alpha, p.beta, p.gamma

    core0 = _core(s0.samples, h, p)
    core = _core(s1.samples, h, p)
    core2 = _core(s2.samples, h, p)
    phi, dphi = g(t), g.derivative(t)
    H = core + phi

    l = np.log(s1.samples)
    G = grad_sq(l, h)
    E = s1.samples**2
    box_h = _time_derivative(core0, core, core2, db, df) + dphi - lap(H, h)
    drift = 2 * dot_grad(l, H, h)

    rhs_identity = (
        drift
        + 2 * (al - be) * hessian_sq(l, h)
        + dphi
        - 2 * b * E * (core + 2 * al * G + be * G - ga * a / b + 3 * ga / b * G)
    )

    c = (al - be) / (n * al**2)
    rhs_inequality = (
        drift
        + H * (2 * c * (H - 2 * be * G - 2 * ga * E - 2 * phi) - 2 * b * E)
        + dphi
        + 2 * G * E * (2 * c * be * ga - 2 * al * b - be * b - 3 * ga)
        + G * phi * (4 * c * be)
        + E * (4 * c * ga * phi + 2 * b * phi + 2 * a * ga)
        + 2 * c * (be**2 * G**2 + ga**2 * E**2 + phi**2)
    )
    return box_h - rhs_identity, box_h - rhs_inequality


# -- classical Harnack ---------------------------------------------------------


@dataclass(frozen=True)
class ClassicalQuery:
    x1: Sequence[float]
    t1: float
    x2: Sequence[float]
    t2: float

    def __post_init__(self):
        if not (self.t1 > 0 and self.t2 > self.t1):
            raise BadTimeOrder(f"need 0 < t1 < t2, got t1={self.t1!r}, t2={self.t2!r}")

    def distance(self, extent=None):
        d = np.abs(np.atleast_1d(np.asarray(self.x2, float) - np.asarray(self.x1, float)))
        if extent is not None:
            d = d % extent
            d = np.minimum(d, extent - d)
        return float(np.sqrt(np.sum(d**2)))


def _log_expm1(x):
    return x + np.log(-np.expm1(-x))


def log_classical_bound(q, pde, extent=None):
    if not (q.t1 > 0 and q.t2 > q.t1):
        raise BadTimeOrder("need 0 < t1 < t2")
    a, n = pde.a, pde.n
    dt = q.t2 - q.t1
    dist = q.distance(extent)
    return (
        -dist**2 / (4 * dt)
        + a * (1 + n / 3) * dt
        + 2 * n / 3 * (_log_expm1(2 * a * q.t1) - _log_expm1(2 * a * q.t2))
    )


def classical_bound(q, pde, extent=None):
    """Lower bound on f(x2, t2) / f(x1, t1) for any positive solution.

    With ``extent`` the points live on a torus of that side and the
    minimal-image distance is used.
    """
    return math.exp(log_classical_bound(q, pde, extent))


def path_bound_numeric(q, pde, steps, extent=None):
    """Integrate the path inequality along the straight space-time segment.

    The gauge comes from :mod:`nwharnack.gauge` evaluated at the classical
    preset, so this is an independent route to :func:`classical_bound`.
    """
    if steps < 10:
        raise InputError("need at least 10 quadrature steps")
    if not (q.t1 > 0 and q.t2 > q.t1):
        raise BadTimeOrder("need 0 < t1 < t2")
    steps += steps % 2
    p = preset("classical", pde, alpha=1.0)
    g = TimeGauge.for_params(p)
    speed_sq = (q.distance(extent) / (q.t2 - q.t1)) ** 2
    ts = np.linspace(q.t1, q.t2, steps + 1)
    integrand = -0.25 * speed_sq + pde.a - g(ts) / p.alpha
    return math.exp(simpson(integrand, x=ts))


@dataclass(frozen=True)
class QueryResult:
    index: int
    log_ratio: float
    log_bound: float
    tolerance: float

    @property
    def slack(self):
        return self.log_ratio - self.log_bound

    @property
    def passed(self):
        return self.slack >= -self.tolerance


def _node_of(grid, x):
    idx = np.asarray(x, float) / grid.h
    nearest = np.rint(idx)
    if np.any(np.abs(idx - nearest) > 1e-9) or np.atleast_1d(nearest).size != grid.dim:
        raise QueryOffGrid(f"point {x!r} is not a grid node")
    nearest = np.atleast_1d(nearest).astype(int) % grid.points
    return tuple(nearest)


def classical_check(traj, queries, tolerance=1e-6):
    grid = traj.grid
    pde = traj.config.pde
    results = []
    for i, q in enumerate(queries):
        try:
            k1, k2 = traj.index_of(q.t1), traj.index_of(q.t2)
        except KeyError as exc:
            raise QueryOffGrid(str(exc)) from None
        f1 = traj.snapshots[k1].samples[_node_of(grid, q.x1)]
        f2 = traj.snapshots[k2].samples[_node_of(grid, q.x2)]
        log_ratio = math.log(f2) - math.log(f1)
        results.append(QueryResult(i, log_ratio, log_classical_bound(q, pde, grid.extent), tolerance))
    return results


def random_queries(traj, count, seed, min_gap=0.1, t_min=0.0):
    """Seeded random node/snapshot pairs with t2 - t1 >= min_gap."""
    rng = np.random.default_rng(seed)
    times = traj.times
    usable = np.flatnonzero((times > 0) & (times >= t_min))
    grid = traj.grid
    queries = []
    while len(queries) < count:
        i, j = sorted(rng.choice(usable, size=2, replace=False))
        if times[j] - times[i] < min_gap:
            continue
        x1 = rng.integers(0, grid.points, size=grid.dim) * grid.h
        x2 = rng.integers(0, grid.points, size=grid.dim) * grid.h
        queries.append(ClassicalQuery(tuple(x1), float(times[i]), tuple(x2), float(times[j])))
    return queries
