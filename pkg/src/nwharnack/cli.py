"""Command-line entry point.

Exit codes: 0 all checks pass, 1 invalid input or config, 2 an inequality is
violated beyond tolerance, 3 numerical failure.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import field, harnack, solver, waves
from .config import load_config
from .errors import InputError, NumericalFailure
from .gauge import TimeGauge
from .params import PDEParams, validate

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION, EXIT_NUMERICAL = 0, 1, 2, 3


def fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path, header, rows, comments=()):
    with open(path, "w") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


class Report:
    """Collects checks, prints PASS/FAIL lines, writes summary and violations.

    A passing check prints one PASS line. A failing check prints one FAIL
    line per violation record, and each such record lands in violations.csv.
    """

    def __init__(self, out=None):
        self.checks = []
        self.violations = []
        self._out = out

    @property
    def out(self):
        return self._out or sys.stdout

    def add(self, name, passed, worst_slack, tolerance, records=()):
        self.checks.append(
            {"name": name, "status": "PASS" if passed else "FAIL",
             "worst_slack": float(worst_slack), "tolerance": float(tolerance)}
        )
        if passed:
            print(f"PASS {name} worst_slack={fmt(worst_slack)} tolerance={fmt(tolerance)}", file=self.out)
            return
        records = list(records) or [{"t": "", "location": "", "value": worst_slack, "slack": worst_slack}]
        for rec in records:
            rec = {"check": name, **rec}
            self.violations.append(rec)
            print(
                f"FAIL {name} t={fmt(rec['t'])} location={fmt(rec['location'])} "
                f"value={fmt(rec['value'])} slack={fmt(rec['slack'])}",
                file=self.out,
            )

    @property
    def passed(self):
        return all(c["status"] == "PASS" for c in self.checks)

    def write(self, directory):
        os.makedirs(directory, exist_ok=True)
        with open(os.path.join(directory, "summary.json"), "w") as fh:
            json.dump({"checks": self.checks}, fh, indent=2)
            fh.write("\n")
        write_csv(
            os.path.join(directory, "violations.csv"),
            ["check", "t", "location", "value", "slack"],
            [[v["check"], v["t"], v["location"], v["value"], v["slack"]] for v in self.violations],
        )

    def exit_code(self):
        return EXIT_OK if self.passed else EXIT_VIOLATION


# -- subcommands ---------------------------------------------------------------


def _params_from_args(args):
    pde = PDEParams(args.a, args.b, args.n)
    return validate(args.alpha, args.beta, args.gamma, pde)


def cmd_validate(args):
    p = _params_from_args(args)
    g = TimeGauge.for_params(p)
    print(f"valid: branch {p.branch.value}")
    c = g.constants
    print(f"omega={fmt(c.omega)} mu={fmt(c.mu)} nu={fmt(c.nu)} limit={fmt(g.limit)}")
    if g.switch_time is not None:
        print(f"switch_time={fmt(g.switch_time)}")
    return EXIT_OK


def cmd_gauge(args):
    p = _params_from_args(args)
    g = TimeGauge.for_params(p)
    if not 0 < args.t0 < args.t1:
        raise InputError("need 0 < t0 < t1")
    ts = np.linspace(args.t0, args.t1, args.steps + 1)
    rows = zip(ts, g(ts), g.derivative(ts), g.ode_residual(ts))
    comments = [f"branch={p.branch.value} kind={g.kind.value}"]
    if g.switch_time is not None:
        comments.append(f"switch_time={fmt(g.switch_time)}")
    header = ["t", "value", "derivative", "ode_residual"]
    if args.out:
        write_csv(args.out, header, rows, comments)
    else:
        for line in comments:
            print(f"# {line}")
        print(",".join(header))
        for row in rows:
            print(",".join(fmt(v) for v in row))
    return EXIT_OK


def _simulate(cfg):
    start = time.perf_counter()
    traj = solver.evolve(cfg.solver)
    return traj, time.perf_counter() - start


def _write_trajectory(traj, directory, wall):
    os.makedirs(directory, exist_ok=True)
    for i, snap in enumerate(traj.snapshots):
        field.write_snapshot(os.path.join(directory, f"snapshot_{i:05d}.csv"), snap)
    manifest = {
        "dt_used": traj.dt_used,
        "steps": traj.steps,
        "snapshots": len(traj.snapshots),
        "wall_time_s": wall,
    }
    with open(os.path.join(directory, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def cmd_simulate(args):
    cfg = load_config(args.config)
    traj, wall = _simulate(cfg)
    _write_trajectory(traj, cfg.output_dir, wall)
    print(f"wrote {len(traj.snapshots)} snapshots to {cfg.output_dir} (dt={fmt(traj.dt_used)}, steps={traj.steps})")
    return EXIT_OK


def cmd_certify(args):
    cfg = load_config(args.config)
    p = cfg.require_harnack()
    traj, _ = _simulate(cfg)
    report = harnack.certify(traj, p, cfg.t_min, cfg.tolerance)
    os.makedirs(cfg.output_dir, exist_ok=True)
    write_csv(
        os.path.join(cfg.output_dir, "certify.csv"),
        ["t", "minH", "argmin", "gauge"],
        [[r.t, r.min_h, r.argmin, r.gauge] for r in report.records],
    )
    out = Report()
    out.add(
        "harnack",
        report.passed,
        report.min_h,
        report.tolerance,
        [{"t": v.t, "location": v.node, "value": v.value, "slack": v.value + report.tolerance}
         for v in report.violations],
    )
    out.write(cfg.output_dir)
    return out.exit_code()


def cmd_classical(args):
    cfg = load_config(args.config)
    opts = cfg.classical
    tol = float(opts.get("tolerance", 1e-6))
    traj, _ = _simulate(cfg)
    queries = harnack.random_queries(
        traj, int(opts.get("queries", 100)), int(opts.get("seed", 0)),
        float(opts.get("min_gap", 0.1)), cfg.t_min,
    )
    results = harnack.classical_check(traj, queries, tol)
    os.makedirs(cfg.output_dir, exist_ok=True)
    write_csv(
        os.path.join(cfg.output_dir, "classical.csv"),
        ["query", "log_ratio", "log_bound", "slack", "pass"],
        [[r.index, r.log_ratio, r.log_bound, r.slack, r.passed] for r in results],
    )
    out = Report()
    failed = [r for r in results if not r.passed]
    out.add(
        "classical",
        not failed,
        min(r.slack for r in results),
        tol,
        [{"t": queries[r.index].t2, "location": f"query {r.index}", "value": r.log_ratio, "slack": r.slack}
         for r in failed],
    )
    out.write(cfg.output_dir)
    return out.exit_code()


def cmd_wave_profile(args):
    pde = PDEParams(args.a, args.b, 1)
    prof = waves.shoot_profile(pde, args.eta, args.half_width, args.tol)
    if isinstance(prof, waves.NoConnection):
        print(f"no connection at eta={fmt(args.eta)}: {prof.reason}")
        speed = waves.check_speed_bound(args.eta, pde)
        print(f"speed bound margin={fmt(speed.margin)}")
        return EXIT_OK
    rows = zip(prof.xi, prof.v, prof.derivative(), prof.ode_residual(pde))
    header = ["xi", "v", "dv", "ode_residual"]
    if args.out:
        write_csv(args.out, header, rows)
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(fmt(v) for v in row))
    out = Report(out=None if args.out else sys.stderr)
    speed = waves.check_speed_bound(args.eta, pde)
    grad_check = waves.check_gradient_bound(prof)
    out.add("speed-bound", speed.passed, speed.margin, 0.0,
            [{"t": "", "location": "eta", "value": args.eta, "slack": speed.margin}])
    out.add("gradient-bound", grad_check.passed, grad_check.margin, 1e-3,
            [{"t": "", "location": "profile", "value": grad_check.value, "slack": grad_check.margin}])
    return out.exit_code()


def cmd_wave_speed(args):
    cfg = load_config(args.config)
    opts = cfg.wave
    level = float(opts.get("level", cfg.pde.equilibrium / 2))
    tol = float(opts.get("tolerance", 1e-3))
    traj, _ = _simulate(cfg)
    track = waves.track_front(traj, level, min_separation=opts.get("min_separation"))
    eta = -track.speed  # f(x, t) = v(x + eta t) moves in -x for eta > 0
    speed = waves.check_speed_bound(eta, cfg.pde)
    final = traj.snapshots[-1]
    u = final.samples
    ratio = np.abs(field.grad(u, cfg.grid.h)[0]) / (u * abs(eta))
    # only the tracked front is a traveling wave; the opposite interface at
    # the periodic seam is not, so look within one separation of the front
    L = cfg.grid.extent
    window = opts.get("min_separation") or L / 8
    gap = np.abs((cfg.grid.axis - track.positions[-1] + L / 2) % L - L / 2)
    ratio = np.where(gap <= window, ratio, 0.0)
    worst_ratio = float(ratio.max())
    os.makedirs(cfg.output_dir, exist_ok=True)
    write_csv(
        os.path.join(cfg.output_dir, "wave_speed.csv"),
        ["measured_speed", "eta_sq", "bound", "margin", "speed_pass", "gradient_ratio_max"],
        [[track.speed, speed.value, 4 * cfg.pde.a / 3, speed.margin, speed.passed, worst_ratio]],
    )
    out = Report()
    out.add("speed-bound", speed.passed, speed.margin, 0.0,
            [{"t": traj.times[-1], "location": "front", "value": eta, "slack": speed.margin}])
    out.add("gradient-bound", worst_ratio <= 1 + tol, 1 - worst_ratio, tol,
            [{"t": final.time, "location": int(np.argmax(ratio)), "value": worst_ratio, "slack": 1 - worst_ratio}])
    out.write(cfg.output_dir)
    return out.exit_code()


def cmd_steady(args):
    cfg = load_config(args.config)
    opts = cfg.steady
    tol = float(opts.get("tol", 1e-7))
    deviation_tol = float(opts.get("deviation", 1e-6))
    final = solver.relax_steady(cfg.solver, tol, float(opts.get("t_max", 40.0)))
    os.makedirs(cfg.output_dir, exist_ok=True)
    field.write_snapshot(os.path.join(cfg.output_dir, "steady.csv"), final)
    dev = np.abs(final.samples - cfg.pde.equilibrium)
    worst = float(dev.max())
    print(f"relaxed by t={fmt(final.time)} to {fmt(float(final.samples.mean()))}; "
          f"equilibrium {fmt(cfg.pde.equilibrium)}")
    out = Report()
    out.add("steady-constant", worst <= deviation_tol, deviation_tol - worst, deviation_tol,
            [{"t": final.time, "location": int(np.argmax(dev)), "value": float(final.samples.flat[int(np.argmax(dev))]),
              "slack": deviation_tol - worst}])
    out.write(cfg.output_dir)
    return out.exit_code()


# -- argument parsing ----------------------------------------------------------


def _add_params(p):
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(prog="nwharnack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check (alpha, beta, gamma) and report the branch")
    _add_params(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gauge", help="tabulate the time gauge")
    _add_params(p)
    p.add_argument("--t0", type=float, default=0.01)
    p.add_argument("--t1", type=float, default=5.0)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_gauge)

    for name, func, text in (
        ("simulate", cmd_simulate, "evolve and write snapshot CSVs"),
        ("certify", cmd_certify, "evolve and check H >= 0 on every snapshot"),
        ("classical", cmd_classical, "evolve and check the classical Harnack ratio bound"),
        ("wave-speed", cmd_wave_speed, "evolve front data and check the wavespeed bound"),
        ("steady", cmd_steady, "relax to a standing solution"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("wave-profile", help="shoot a traveling-wave profile")
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--half-width", type=float, default=40.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_wave_profile)
    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalFailure, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run())
