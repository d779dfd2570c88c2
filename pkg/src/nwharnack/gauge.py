"""Closed-form time gauges added to the Harnack quantity.

Both gauges blow up at t = 0 and decay to ``-a gamma / b``. Branch C uses a
single Riccati solution ``phi``. Branch D uses ``psi``, which follows
``n alpha^2 / (2 (alpha - beta) t)`` up to the switch time T and a second
Riccati solution afterwards; the two pieces agree to second order at T.

All formulas are written in terms of ``exp(-2 a t)`` or ``expm1`` so that
large t never overflows.
"""

from dataclasses import dataclass
import enum
from typing import Optional

import numpy as np

from .errors import NonPositiveTime
from .params import Branch, GaugeConstants, HarnackParams, gauge_constants, switch_time


class GaugeKind(enum.Enum):
    PHI = "phi"
    PSI = "psi"


def _times(t):
    arr = np.asarray(t, dtype=float)
    if np.any(~(arr > 0)):
        raise NonPositiveTime(f"gauge needs t > 0, got {t!r}")
    return arr


def _out(values, t):
    return float(values) if np.ndim(t) == 0 else values


@dataclass(frozen=True)
class TimeGauge:
    params: HarnackParams
    constants: GaugeConstants
    kind: GaugeKind
    switch_time: Optional[float] = None

    @classmethod
    def for_params(cls, p):
        c = gauge_constants(p)
        if p.branch is Branch.C:
            return cls(p, c, GaugeKind.PHI)
        return cls(p, c, GaugeKind.PSI, switch_time(p))

    @property
    def limit(self):
        p = self.params
        return -p.pde.a * p.gamma / p.pde.b

    @property
    def _kappa(self):
        p = self.params
        return 2 * (p.alpha - p.beta) / (p.pde.n * p.alpha**2)

    def limit_at_infinity(self):
        return self.limit

    # -- branch C ----------------------------------------------------------

    def _phi(self, t, order):
        c = self.constants
        a = self.params.pde.a
        r1 = self.limit
        r2 = -c.mu / (c.nu + c.omega)
        x = 2 * a * t
        decay = np.exp(-x)
        emn = -np.expm1(-x)  # 1 - e^{-2at}, no overflow for large t
        if order == 0:
            return r1 + (r1 - r2) * decay / emn
        if order == 1:
            return -2 * a * (r1 - r2) * decay / emn**2
        return 4 * a**2 * (r1 - r2) * (1 + decay) * decay / emn**3

    # -- branch D ----------------------------------------------------------

    def psi_short(self, t, order=0):
        """The 1/t piece, evaluated for any t > 0."""
        t = _times(t)
        c = 1 / self._kappa
        vals = (c / t, -c / t**2, 2 * c / t**3)[order]
        return _out(vals, t)

    def psi_long(self, t, order=0):
        """The Riccati tail, evaluated for any t >= T."""
        t = _times(t)
        c = self.constants
        a = self.params.pde.a
        u1 = (c.omega - c.nu) / c.mu
        u2 = -(c.omega + c.nu) / c.mu
        e = np.exp(-2 * a * (t - self.switch_time))
        d = u1 + u2 * e
        if order == 0:
            vals = (1 + e) / d
        elif order == 1:
            vals = -4 * a * c.omega * e / (c.mu * d**2)
        else:
            vals = 8 * a**2 * c.omega * e * (d - 2 * u2 * e) / (c.mu * d**3)
        return _out(vals, t)

    # -- public evaluation -------------------------------------------------

    def _eval(self, t, order):
        arr = _times(t)
        if self.kind is GaugeKind.PHI:
            vals = self._phi(arr, order)
        else:
            flat = np.atleast_1d(arr)
            short = flat <= self.switch_time
            # evaluate each piece only where it is active
            vals = np.empty_like(flat)
            vals[short] = self.psi_short(flat[short], order)
            vals[~short] = self.psi_long(flat[~short], order)
            vals = vals.reshape(arr.shape)
        return _out(vals, t)

    def evaluate(self, t):
        return self._eval(t, 0)

    __call__ = evaluate

    def derivative(self, t):
        return self._eval(t, 1)

    def second_derivative(self, t):
        return self._eval(t, 2)

    def ode_residual(self, t):
        """Residual of the ODE the active gauge piece solves; zero up to rounding."""
        arr = _times(t)
        g = self._eval(arr, 0)
        dg = self._eval(arr, 1)
        c = self.constants
        riccati = (c.omega * g) ** 2 - (c.mu + c.nu * g) ** 2 + dg
        if self.kind is GaugeKind.PHI:
            return _out(riccati, t)
        blowup = self._kappa * g**2 + dg
        return _out(np.where(arr <= self.switch_time, blowup, riccati), t)


def gauge_for(p):
    return TimeGauge.for_params(p)
