"""Scalar parameters of the Newell-Whitehead equation and of the Harnack quantity.

The equation is ``f_t = Δf + a f - b f**3`` on R^n. The Harnack quantity is

    H = alpha Δl + beta |∇l|^2 + gamma e^{2l} + gauge(t),   l = log f,

and it is nonnegative for admissible (alpha, beta, gamma). Admissibility is
checked by :func:`validate`, which also decides which time gauge applies.
"""

from dataclasses import dataclass
import enum
import math

from .errors import (
    ConditionAViolated,
    ConditionBViolated,
    InputError,
    NonFiniteInput,
    WrongBranch,
)


class Branch(enum.Enum):
    C = "C"
    D = "D"


@dataclass(frozen=True)
class PDEParams:
    a: float
    b: float
    n: int = 1

    def __post_init__(self):
        for name in ("a", "b"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise NonFiniteInput(f"{name} must be finite, got {value!r}")
            if value <= 0:
                raise InputError(f"{name} must be positive, got {value!r}")
        if int(self.n) != self.n or self.n < 1:
            raise InputError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def equilibrium(self):
        """The positive constant steady state sqrt(a/b)."""
        return math.sqrt(self.a / self.b)


@dataclass(frozen=True)
class GaugeConstants:
    omega: float
    mu: float
    nu: float


@dataclass(frozen=True)
class HarnackParams:
    pde: PDEParams
    alpha: float
    beta: float
    gamma: float
    branch: Branch

    @property
    def branch_quantity(self):
        return branch_quantity(self.alpha, self.beta, self.gamma, self.pde)


def condition_b_bound(alpha, beta, pde):
    """Upper bound that gamma must not exceed."""
    n, b = pde.n, pde.b
    return -n * b * alpha**2 * (2 * alpha + beta) / (3 * n * alpha**2 - 2 * (alpha - beta) * beta)


def branch_quantity(alpha, beta, gamma, pde):
    """4 gamma (alpha - beta) + n alpha^2 b; negative selects branch C."""
    return 4 * gamma * (alpha - beta) + pde.n * alpha**2 * pde.b


def validate(alpha, beta, gamma, pde):
    """Check admissibility of (alpha, beta, gamma) and tag the gauge branch.

    Raises :class:`ConditionAViolated` or :class:`ConditionBViolated` naming
    the failed condition, or :class:`NonFiniteInput` for NaN/inf input.
    """
    for name, value in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        if not math.isfinite(value):
            raise NonFiniteInput(f"{name} must be finite, got {value!r}")
    alpha, beta, gamma = float(alpha), float(beta), float(gamma)
    if not alpha > beta:
        raise ConditionAViolated(f"need alpha > beta, got alpha={alpha!r}, beta={beta!r}")
    if beta < 0:
        raise ConditionAViolated(f"need beta >= 0, got beta={beta!r}")
    try:
        bound = condition_b_bound(alpha, beta, pde)
    except (OverflowError, ZeroDivisionError):
        bound = math.nan
    if math.isnan(bound):
        raise NonFiniteInput("condition (b) threshold is not finitely representable for these values")
    if not gamma <= bound:
        raise ConditionBViolated(f"need gamma <= {bound!r}, got gamma={gamma!r}")
    if not gamma < 0:
        raise ConditionBViolated(f"need gamma < 0, got gamma={gamma!r}")
    # equality goes to D, matching the non-strict inequality there
    branch = Branch.C if branch_quantity(alpha, beta, gamma, pde) < 0 else Branch.D
    return HarnackParams(pde=pde, alpha=alpha, beta=beta, gamma=gamma, branch=branch)


def gauge_constants(p):
    a, b, n = p.pde.a, p.pde.b, p.pde.n
    gap = p.alpha - p.beta
    omega = math.sqrt(2 * gap / n) / p.alpha
    root = math.sqrt(n / (2 * gap))
    mu = a * p.alpha * root
    nu = omega + p.alpha * b / p.gamma * root
    return GaugeConstants(omega=omega, mu=mu, nu=nu)


def switch_time(p):
    """Time T at which the branch-D gauge switches from its 1/t part to its tail."""
    if p.branch is not Branch.D:
        raise WrongBranch("switch time exists only for branch D parameters")
    a, b, n = p.pde.a, p.pde.b, p.pde.n
    kappa = 2 * (p.alpha - p.beta) / (n * p.alpha**2)
    return (kappa * p.gamma + b) / (kappa * (-a * p.gamma))


# Coefficient choices used by the corollaries. Each takes the PDE parameters
# and alpha and returns (alpha, beta, gamma).
PRESETS = {
    # classical Harnack: beta = 0, gamma = -n b alpha
    "classical": lambda pde, alpha=1.0: (alpha, 0.0, -pde.n * pde.b * alpha),
    # wavespeed bound: beta = 0, gamma = -(2/3) b alpha
    "wavespeed": lambda pde, alpha=1.0: (alpha, 0.0, -2.0 / 3.0 * pde.b * alpha),
    # gradient bound and standing solutions: beta = 0, gamma = -b alpha
    "gradient": lambda pde, alpha=1.0: (alpha, 0.0, -pde.b * alpha),
    # simplified Harnack choice, with alpha restored in gamma
    "simple": lambda pde, alpha=1.0: (alpha, 0.0, -2.0 * pde.n * pde.b * alpha),
}


def preset(name, pde, alpha=1.0):
    try:
        make = PRESETS[name]
    except KeyError:
        raise InputError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return validate(*make(pde, alpha), pde)
