"""Traveling waves f(x, t) = v(x + eta t) and the bounds they must obey.

With this convention the profile solves v'' - eta v' + a v - b v^3 = 0 and a
front whose profile rises with xi moves in the -x direction at speed eta.
"""

from dataclasses import dataclass, field as dc_field
import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import expit

from .errors import FrontHitBoundaryWindow, InputError, LevelNotCrossed, NonFiniteState


@dataclass(frozen=True, eq=False)
class WaveProfile:
    xi: np.ndarray = dc_field(repr=False)
    v: np.ndarray = dc_field(repr=False)
    eta: float = 0.0

    @property
    def spacing(self):
        return float(self.xi[1] - self.xi[0])

    def derivative(self):
        return np.gradient(self.v, self.spacing, edge_order=2)

    def second_derivative(self):
        h = self.spacing
        d2 = np.empty_like(self.v)
        d2[1:-1] = (self.v[2:] - 2 * self.v[1:-1] + self.v[:-2]) / h**2
        d2[0], d2[-1] = d2[1], d2[-2]
        return d2

    def ode_residual(self, pde):
        v = self.v
        return self.second_derivative() - self.eta * self.derivative() + pde.a * v - pde.b * v**3


@dataclass(frozen=True)
class NoConnection:
    """Shooting did not produce a positive monotone front; ``reason`` says why."""

    eta: float
    reason: str


def exact_front_speed(pde):
    return 3 * math.sqrt(pde.a / 2)


def exact_front_value(xi, pde):
    k = math.sqrt(pde.a / 8)
    return pde.equilibrium * expit(2 * k * np.asarray(xi, float))


def exact_front_derivatives(xi, pde):
    """Analytic (v, v', v'') of the closed-form front."""
    m = math.sqrt(pde.a / 2)
    s = expit(m * np.asarray(xi, float))
    amp = pde.equilibrium
    d1 = m * s * (1 - s)
    d2 = m * d1 * (1 - 2 * s)
    return amp * s, amp * d1, amp * d2


def exact_front(pde, half_width=40.0, points=4001):
    """Closed-form front between 0 and sqrt(a/b), sampled on [-W, W]."""
    xi = np.linspace(-half_width, half_width, points)
    return WaveProfile(xi, exact_front_value(xi, pde), exact_front_speed(pde))


def shoot_profile(pde, eta, domain_half_width=40.0, tol=1e-6, delta=1e-8, samples=4001):
    """Follow the unstable manifold of sqrt(a/b) (backwards in xi) down to 0.

    Returns a :class:`WaveProfile` shifted so that v = sqrt(a/b)/2 at xi = 0,
    or :class:`NoConnection` when the orbit loses positivity or monotonicity
    or runs out of room.
    """
    if eta == 0 or not math.isfinite(eta):
        raise InputError("eta must be finite and nonzero")
    a, b = pde.a, pde.b
    top = pde.equilibrium
    # decaying root of lambda^2 - eta lambda - 2a at the saddle
    lam = (eta - math.copysign(math.sqrt(eta**2 + 8 * a), eta)) / 2
    sign = 1.0 if eta > 0 else -1.0
    t_end = -sign * 2 * domain_half_width
    opts = dict(method="DOP853", rtol=1e-12, atol=1e-300, dense_output=True)

    # Phase 1 integrates w = top - v. Near the saddle v itself carries the
    # 1e-8 offset on top of O(1), which the relative tolerance cannot resolve.
    def f_dev(xi, y):
        w = y[0]
        return [y[1], eta * y[1] + 2 * a * w - 3 * b * top * w**2 + b * w**3]

    def halfway(xi, y):
        return y[0] - top / 2

    def dev_monotone(xi, y):
        return -sign * y[1]

    def dev_overshoot(xi, y):
        return y[0] + tol

    for ev in (halfway, dev_monotone, dev_overshoot):
        ev.terminal = True
    first = solve_ivp(f_dev, (0.0, t_end), [delta, lam * delta],
                      events=(halfway, dev_monotone, dev_overshoot), **opts)
    if not np.all(np.isfinite(first.y)):
        raise NonFiniteState(float(first.t[-1]))
    if first.t_events[1].size:
        return NoConnection(eta, "profile lost monotonicity")
    if first.t_events[2].size:
        return NoConnection(eta, "profile overshot the equilibrium")
    if not first.t_events[0].size:
        return NoConnection(eta, "domain exhausted before reaching 0")
    xi_mid = float(first.t_events[0][0])
    w_mid, dw_mid = first.y_events[0][0]

    def f(xi, y):
        return [y[1], eta * y[1] - a * y[0] + b * y[0] ** 3]

    def crossed_zero(xi, y):
        return y[0]

    def lost_monotone(xi, y):
        return sign * y[1]

    def overshoot(xi, y):
        return top + tol - y[0]

    for ev in (crossed_zero, lost_monotone, overshoot):
        ev.terminal = True

    # Run the whole span: a spiral into 0 passes through every small value of
    # v before it changes sign, so "v got small" alone proves nothing.
    sol = solve_ivp(f, (xi_mid, t_end), [top - w_mid, -dw_mid],
                    events=(crossed_zero, lost_monotone, overshoot), **opts)
    if not np.all(np.isfinite(sol.y)):
        raise NonFiniteState(float(sol.t[-1]))
    if sol.t_events[0].size:
        return NoConnection(eta, "profile crossed zero")
    if sol.t_events[1].size:
        return NoConnection(eta, "profile lost monotonicity")
    if sol.t_events[2].size:
        return NoConnection(eta, "profile overshot the equilibrium")
    if not sol.y[0, -1] < tol:
        return NoConnection(eta, "domain exhausted before reaching 0")

    def value(x):
        # x runs from 0 toward t_end; the first phase covers [0, xi_mid]
        early = sign * x >= sign * xi_mid
        out = np.empty_like(x)
        out[early] = top - first.sol(x[early])[0]
        out[~early] = sol.sol(x[~early])[0]
        return out

    # cut where v reaches tol; v = top/2 exactly at xi_mid, which becomes 0
    fine = np.linspace(xi_mid, t_end, 20001)
    below = np.flatnonzero(sol.sol(fine)[0] < tol)
    xi_end = fine[below[0]]
    xi = np.linspace(min(0.0, xi_end), max(0.0, xi_end), samples)
    return WaveProfile(xi - xi_mid, value(xi), eta)


@dataclass(frozen=True)
class BoundCheck:
    passed: bool
    value: float
    margin: float


def check_speed_bound(eta, pde, tol=0.0):
    """eta^2 >= 4a/3 for any positive front decaying to 0."""
    margin = eta**2 - 4 * pde.a / 3
    return BoundCheck(margin >= -tol, eta**2, margin)


def gradient_ratio(profile):
    return np.abs(profile.derivative()) / (profile.v * abs(profile.eta))


def check_gradient_bound(profile, tol=1e-3):
    """|v'| <= v |eta| at every sample."""
    worst = float(gradient_ratio(profile).max())
    return BoundCheck(worst <= 1 + tol, worst, 1 - worst)


# -- front speed from simulations ----------------------------------------------


def _crossings(u, level, h, upward):
    nxt = np.roll(u, -1)
    if upward:
        idx = np.flatnonzero((u < level) & (nxt >= level))
    else:
        idx = np.flatnonzero((u >= level) & (nxt < level))
    frac = (level - u[idx]) / (nxt[idx] - u[idx])
    return (idx + frac) * h


@dataclass(frozen=True)
class FrontTrack:
    times: np.ndarray
    positions: np.ndarray
    speed: float


def track_front(traj, level, upward=True, min_separation=None, fit_fraction=0.5):
    """Follow one level crossing through the trajectory and fit its velocity.

    Positions are unwrapped across the periodic seam. Only the last
    ``fit_fraction`` of the time window enters the least-squares fit, and
    during that window the tracked crossing must stay ``min_separation`` away
    from every crossing of the opposite orientation.
    """
    grid = traj.grid
    if grid.dim != 1:
        raise InputError("front tracking is one-dimensional")
    L, h = grid.extent, grid.h
    if min_separation is None:
        min_separation = L / 8
    t_end = traj.times[-1]
    times, positions = [], []
    prev = None
    for snap in traj.snapshots:
        u = snap.samples
        cands = _crossings(u, level, h, upward)
        if cands.size == 0:
            raise LevelNotCrossed(f"level {level!r} not crossed at t={snap.time!r}")
        if prev is None:
            pos = cands[0] if cands.size == 1 else cands[np.argmin(np.abs(cands - L / 2))]
            unwrapped = pos
        else:
            shift = (cands - prev + L / 2) % L - L / 2
            j = int(np.argmin(np.abs(shift)))
            unwrapped = prev + shift[j]
        if snap.time >= (1 - fit_fraction) * t_end:
            others = _crossings(u, level, h, not upward)
            if others.size:
                gap = np.abs((others - unwrapped + L / 2) % L - L / 2).min()
                if gap < min_separation:
                    raise FrontHitBoundaryWindow(
                        f"front within {gap:.3g} of the opposing interface at t={snap.time!r}"
                    )
            times.append(snap.time)
            positions.append(unwrapped)
        prev = unwrapped
    times, positions = np.array(times), np.array(positions)
    if times.size < 2:
        raise InputError("need at least two snapshots in the fit window")
    slope = float(np.polyfit(times, positions, 1)[0])
    return FrontTrack(times, positions, slope)


def measure_front_speed(traj, level, upward=True, min_separation=None):
    """Signed velocity of the tracked crossing (about -eta for a rising front)."""
    return track_front(traj, level, upward, min_separation).speed
