"""JSON run configuration with strict key checking.

A minimal document needs only ``pde``, ``grid`` and ``time`` sections::

    {
      "pde": {"a": 1, "b": 1, "dim": 1},
      "grid": {"extent": 20, "points": 256},
      "time": {"t_end": 5, "snapshot_interval": 0.05}
    }

Unknown keys anywhere are errors so that a typo cannot silently change a run.
"""

from dataclasses import dataclass, field as dc_field
import json
from typing import Optional

from .errors import ConstraintViolation, ParseError, UnknownKey
from .field import Grid
from .params import HarnackParams, PDEParams, validate
from .solver import (
    Constant,
    Equilibrium,
    Front,
    GaussianBump,
    RandomPositive,
    SinePerturbed,
    SolverConfig,
    Step,
)

DEFAULT_TOLERANCE = 5e-3
DEFAULT_T_MIN = 0.05
DEFAULT_CFL = 0.4

_SECTIONS = {
    "pde": ({"a", "b"}, {"dim"}),
    "harnack": (set(), {"alpha", "beta", "gamma", "tolerance", "t_min"}),
    "grid": ({"extent", "points"}, {"bc"}),
    "time": ({"t_end", "snapshot_interval"}, {"cfl_safety", "dt"}),
    "init": ({"kind"}, {"value", "amplitude", "mode", "center", "width", "floor", "lo", "hi", "seed"}),
    "output": (set(), {"directory"}),
    "classical": (set(), {"queries", "seed", "min_gap", "tolerance"}),
    "wave": (set(), {"level", "min_separation", "tolerance"}),
    "steady": (set(), {"tol", "t_max", "deviation"}),
}
_REQUIRED = ("pde", "grid", "time")

_INIT_KINDS = {
    "constant": (Constant, ("value",)),
    "equilibrium": (Equilibrium, ()),
    "sine": (SinePerturbed, ("amplitude", "mode")),
    "gaussian": (GaussianBump, ("center", "width", "floor")),
    "random": (RandomPositive, ("lo", "hi", "seed")),
    "front": (Front, ("center",)),
    "step": (Step, ("lo", "hi", "center")),
}


@dataclass
class RunConfig:
    pde: PDEParams
    grid: Grid
    solver: SolverConfig
    harnack: Optional[HarnackParams] = None
    tolerance: float = DEFAULT_TOLERANCE
    t_min: float = DEFAULT_T_MIN
    output_dir: str = "output"
    classical: dict = dc_field(default_factory=dict)
    wave: dict = dc_field(default_factory=dict)
    steady: dict = dc_field(default_factory=dict)

    def require_harnack(self):
        if self.harnack is None:
            raise ConstraintViolation("this command needs alpha, beta and gamma in the harnack section")
        return self.harnack


def _check_keys(doc):
    if not isinstance(doc, dict):
        raise ConstraintViolation("top level must be an object")
    for name, body in doc.items():
        if name not in _SECTIONS:
            raise UnknownKey(name)
        if not isinstance(body, dict):
            raise ConstraintViolation(f"section {name!r} must be an object")
        required, optional = _SECTIONS[name]
        for key in body:
            if key not in required | optional:
                raise UnknownKey(key)
        missing = required - set(body)
        if missing:
            raise ConstraintViolation(f"section {name!r} is missing {sorted(missing)}")
    for name in _REQUIRED:
        if name not in doc:
            raise ConstraintViolation(f"missing required section {name!r}")


def _initial_condition(init):
    kind = init.get("kind", "equilibrium")
    if kind not in _INIT_KINDS:
        raise ConstraintViolation(f"unknown init kind {kind!r}; choose from {sorted(_INIT_KINDS)}")
    cls, fields = _INIT_KINDS[kind]
    args = {k: init[k] for k in fields if k in init}
    extra = set(init) - set(fields) - {"kind", "seed"}
    if extra:
        raise ConstraintViolation(f"init kind {kind!r} does not take {sorted(extra)}")
    try:
        return cls(**args)
    except TypeError as exc:
        raise ConstraintViolation(f"init kind {kind!r}: {exc}") from None


def parse_config(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg) from None
    _check_keys(doc)
    try:
        return _build(doc)
    except ConstraintViolation:
        raise
    except (TypeError, ValueError) as exc:
        # parameter validators raise InputError (a ValueError) naming the
        # violated condition; keep that message
        raise ConstraintViolation(str(exc)) from exc


def _build(doc):
    pd = doc["pde"]
    pde = PDEParams(float(pd["a"]), float(pd["b"]), pd.get("dim", 1))
    gd = doc["grid"]
    if gd.get("bc", "periodic") != "periodic":
        raise ConstraintViolation("only periodic boundaries are supported")
    grid = Grid(pde.n, gd["points"], float(gd["extent"]))

    td = doc["time"]
    init = _initial_condition(doc.get("init", {"kind": "equilibrium"}))
    solver = SolverConfig(
        pde=pde,
        grid=grid,
        t_end=float(td["t_end"]),
        snapshot_interval=float(td["snapshot_interval"]),
        initial_condition=init,
        cfl_safety=float(td.get("cfl_safety", DEFAULT_CFL)),
        dt=td.get("dt"),
    )

    hd = doc.get("harnack", {})
    coeffs = [k for k in ("alpha", "beta", "gamma") if k in hd]
    harnack = None
    if coeffs:
        if len(coeffs) != 3:
            raise ConstraintViolation("harnack section needs all of alpha, beta, gamma")
        harnack = validate(float(hd["alpha"]), float(hd["beta"]), float(hd["gamma"]), pde)
    tolerance = float(hd.get("tolerance", DEFAULT_TOLERANCE))
    t_min = float(hd.get("t_min", DEFAULT_T_MIN))
    if not tolerance > 0 or not t_min > 0:
        raise ConstraintViolation("tolerance and t_min must be positive")

    return RunConfig(
        pde=pde,
        grid=grid,
        solver=solver,
        harnack=harnack,
        tolerance=tolerance,
        t_min=t_min,
        output_dir=doc.get("output", {}).get("directory", "output"),
        classical=dict(doc.get("classical", {})),
        wave=dict(doc.get("wave", {})),
        steady=dict(doc.get("steady", {})),
    )


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())
