"""Command-line front end.

    esdlab evolve     --preset eq18 --m 0.1 --n 0.1 --grid 0:1:0.01
    esdlab esd-time   --preset eq18 --m 0.1 --n 0.1
    esdlab sweep      --preset eq18 --m 0.1 --n 0.1 --swap 11-44 --grid 0:0.41:0.005
    esdlab werner-scan --grid 0.34:1:0.01
    esdlab validate   --state state.json

Exit codes: 0 ok, 2 bad input, 3 runtime failure.  All times are in
absolute units; with the default rates gamma1 = gamma2 = 1 they read as
gamma*t.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import control, criteria, oracle, qstate
from .errors import EsdLabError, InvalidState
from .thermal import ReservoirParams, evolve

EXIT_OK, EXIT_INPUT, EXIT_RUNTIME = 0, 2, 3


class InputError(Exception):
    """Bad command-line input; maps to exit code 2."""


PRESETS = {
    "eq18": lambda: qstate.eq18_state(+1).to_density(),
    "eq18-minus": lambda: qstate.eq18_state(-1).to_density(),
    "bell-psi-plus": qstate.bell_psi_plus,
    "bell-phi-plus": qstate.bell_phi_plus,
}
_PARAM_PRESET = re.compile(r"^(werner-singlet|werner-triplet)[(:]\s*([^)]+?)\s*\)?$")


def load_preset(name: str) -> qstate.DensityMatrix:
    if name in PRESETS:
        return PRESETS[name]()
    match = _PARAM_PRESET.match(name)
    if match:
        family, arg = match.groups()
        try:
            a = float(arg)
        except ValueError:
            raise InputError(f"preset {name!r}: Werner weight {arg!r} is not a number") from None
        if not 0 < a <= 1:
            raise InputError(f"preset {name!r}: Werner weight must lie in (0, 1]")
        make = qstate.werner_singlet if family == "werner-singlet" else qstate.werner_triplet
        return make(a).to_density()
    known = ", ".join(list(PRESETS) + ["werner-singlet(a)", "werner-triplet(a)"])
    raise InputError(f"unknown preset {name!r}; choose from {known}")


def load_state(args: argparse.Namespace) -> qstate.DensityMatrix:
    if bool(args.state) == bool(args.preset):
        raise InputError("give exactly one of --state or --preset")
    if args.preset:
        rho = load_preset(args.preset)
    else:
        text = args.state
        if not text.lstrip().startswith("{"):
            path = Path(text)
            try:
                text = path.read_text()
            except OSError as exc:
                raise InputError(f"cannot read state file {path}: {exc}") from None
        try:
            rho = qstate.state_from_json(text)
        except InvalidState as exc:
            raise InputError(f"--state: {exc}") from None
    report = qstate.validate(rho)
    if not report.valid:
        raise InputError(f"state is not a valid density matrix: {report.summary()}")
    return rho


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise InputError(f"grid {text!r} must be start:stop:step")
            start, stop, step = parts
            if step <= 0:
                raise InputError(f"grid {text!r}: step must be positive")
            if stop < start:
                return []
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            # integer multiples avoid accumulated drift
            return [start + k * step for k in range(count)]
        values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise InputError(f"grid {text!r} is not numeric") from None
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InputError(f"grid {text!r} must be strictly increasing")
    return values


def params_from(args: argparse.Namespace) -> ReservoirParams:
    try:
        n = args.m if args.n is None else args.n
        return ReservoirParams(args.gamma1, args.gamma2, args.m, n)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def horizon_from(args: argparse.Namespace, params: ReservoirParams) -> float:
    if args.horizon is not None:
        h = args.horizon
    elif os.environ.get("ESDLAB_HORIZON"):
        try:
            h = float(os.environ["ESDLAB_HORIZON"])
        except ValueError:
            raise InputError("ESDLAB_HORIZON is not a number") from None
    else:
        h = control.DEFAULT_HORIZON / params.rate_min
    if not h > 0:
        raise InputError(f"horizon must be positive, got {h}")
    return h


def fmt(x: float | None) -> str:
    return "no-death" if x is None else format(x, ".17g")


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, float) or v is None else v for v in row])
    return buf.getvalue()


# -- commands --------------------------------------------------------------

_ELEMENTS = [(i, i) for i in range(4)] + [(i, j) for i in range(4) for j in range(i + 1, 4)]


def _element_columns() -> list[str]:
    cols = [f"rho{i + 1}{i + 1}" for i in range(4)]
    for i, j in _ELEMENTS[4:]:
        cols += [f"re_rho{i + 1}{j + 1}", f"im_rho{i + 1}{j + 1}"]
    return cols


def cmd_evolve(args: argparse.Namespace) -> int:
    rho0 = load_state(args)
    params = params_from(args)
    times = parse_grid(args.grid) if args.grid else [args.t if args.t is not None else 1.0]
    if not times:
        raise InputError("time grid is empty")
    if times[0] < 0:
        raise InputError("times must be nonnegative")
    rows, records = [], []
    cfg = oracle.IntegratorConfig(dt=1e-3 / params.rate_max)
    for t in times:
        rho = evolve(rho0, params, t, check=False)
        a = rho.elements
        row: list = [t] + [float(a[i, i].real) for i in range(4)]
        for i, j in _ELEMENTS[4:]:
            row += [float(a[i, j].real), float(a[i, j].imag)]
        neg = qstate.negativity(rho)
        row.append(neg)
        rec = {"t": t, "state": rho.to_json(), "negativity": neg}
        if args.oracle:
            dev = float(np.max(np.abs(oracle.integrate(rho0, params, t, cfg).elements - a)))
            row.append(dev)
            rec["oracle_deviation"] = dev
        rows.append(row)
        records.append(rec)
    if args.format == "json":
        _write(json.dumps({"params": params.to_json(), "trajectory": records}) + "\n", args.out)
    else:
        header = ["t"] + _element_columns() + ["negativity"] + (["oracle_dev"] if args.oracle else [])
        _write(_csv(header, rows), args.out)
    return EXIT_OK


def cmd_esd_time(args: argparse.Namespace) -> int:
    rho0 = load_state(args)
    params = params_from(args)
    horizon = horizon_from(args, params)
    schedule = None
    if args.swap:
        if args.t_sw is None:
            raise InputError("--swap needs --t-sw")
        schedule = control.SwitchSchedule(args.t_sw, *control.SWAPS[args.swap])
    t = control.find_esd_time(rho0, params, schedule, horizon)
    if args.format == "json":
        _write(json.dumps({"t_esd": t, "horizon": horizon, "params": params.to_json()}) + "\n",
               args.out)
    else:
        _write((fmt(t) if t is not None else f"no-death({horizon:g})") + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    rho0 = load_state(args)
    params = params_from(args)
    horizon = horizon_from(args, params)
    grid = parse_grid(args.grid)
    if not grid:
        raise InputError("switch-time grid is empty")
    unitaries = control.SWAPS[args.swap]
    try:
        res = control.sweep_switch(rho0, params, unitaries, grid, horizon, workers=args.workers)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    summary = res.summary()
    if args.format == "json":
        doc = dict(summary, samples=[[s, e] for s, e in res.samples])
        _write(json.dumps(doc) + "\n", args.out)
        return EXIT_OK
    _write(_csv(["t_sw", "t_end"], res.samples), args.out)
    text = json.dumps(summary) + "\n"
    if args.out:
        Path(args.out).with_suffix(".summary.json").write_text(text)
    else:
        sys.stderr.write(text)
    return EXIT_OK


WERNER_NEAR = 1e-6


def werner_rows(grid: Sequence[float], families: Sequence[str], horizon: float) -> list[list]:
    params = ReservoirParams()
    rows = []
    for family in families:
        make = qstate.werner_singlet if family == "singlet" else qstate.werner_triplet
        for a in grid:
            verdict = criteria.werner_verdict(a, family)
            x = make(a)
            t_esd = None
            flag = ""
            if verdict != "separable":
                t_esd = control.find_esd_time(x, params, None, horizon)
                cond = criteria.esd_zero_temperature(x).conditions.values()
                if min(abs(c) for c in cond) < WERNER_NEAR:
                    flag = "near-boundary"
            elif abs(min(x.minor14, x.minor23)) < WERNER_NEAR:
                flag = "near-boundary"
            rows.append([family, a, verdict, t_esd, flag])
    return rows


def cmd_werner_scan(args: argparse.Namespace) -> int:
    grid = parse_grid(args.grid)
    if not grid:
        raise InputError("a-grid is empty")
    if grid[0] <= 0 or grid[-1] > 1:
        raise InputError("Werner weights must lie in (0, 1]")
    families = ["singlet", "triplet"] if args.family == "both" else [args.family]
    horizon = horizon_from(args, ReservoirParams())
    rows = werner_rows(grid, families, horizon)
    if args.format == "json":
        doc = [dict(zip(["family", "a", "verdict", "t_esd", "flag"], r)) for r in rows]
        _write(json.dumps(doc) + "\n", args.out)
    else:
        _write(_csv(["family", "a", "verdict", "t_esd", "flag"], rows), args.out)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    if bool(args.state) == bool(args.preset):
        raise InputError("give exactly one of --state or --preset")
    if args.preset:
        rho = load_preset(args.preset)
    else:
        text = args.state
        if not text.lstrip().startswith("{"):
            try:
                text = Path(text).read_text()
            except OSError as exc:
                raise InputError(f"cannot read state file: {exc}") from None
        try:
            rho = qstate.state_from_json(text)
        except InvalidState as exc:
            raise InputError(f"--state: {exc}") from None
    report = qstate.validate(rho)
    doc = {"valid": report.valid,
           "violations": [{"name": v.name, "magnitude": v.magnitude} for v in report.violations]}
    if report.valid:
        p, minors = qstate.min_seven_minors(rho)
        doc.update(P=p, minors=minors.as_dict(), negativity=qstate.negativity(rho),
                   entangled=p < 0)
    _write(json.dumps(doc) + "\n", args.out)
    return EXIT_OK if report.valid else EXIT_INPUT


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("state")
    src.add_argument("--state", help="inline JSON state or path to a JSON file")
    src.add_argument("--preset", help="eq18, eq18-minus, bell-psi-plus, bell-phi-plus, "
                                      "werner-singlet(a), werner-triplet(a)")
    res = common.add_argument_group("reservoirs")
    res.add_argument("--m", type=float, default=0.0, help="mean photon number, bath of qubit A")
    res.add_argument("--n", type=float, default=None,
                     help="mean photon number, bath of qubit B (default: same as --m)")
    res.add_argument("--gamma1", type=float, default=1.0)
    res.add_argument("--gamma2", type=float, default=1.0)
    common.add_argument("--horizon", type=float, default=None,
                        help="search horizon (default 30/gamma, or $ESDLAB_HORIZON)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="esdlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evolve", parents=[common], help="tabulate rho(t) and its negativity")
    ev.add_argument("--t", type=float, help="single time")
    ev.add_argument("--grid", help="time grid start:stop:step")
    ev.add_argument("--oracle", action="store_true", help="add RK4 deviation column")
    ev.set_defaults(func=cmd_evolve)

    es = sub.add_parser("esd-time", parents=[common], help="time of entanglement sudden death")
    es.add_argument("--swap", choices=sorted(control.SWAPS))
    es.add_argument("--t-sw", type=float, dest="t_sw")
    es.set_defaults(func=cmd_esd_time)

    sw = sub.add_parser("sweep", parents=[common], help="death time versus switching time")
    sw.add_argument("--swap", choices=sorted(control.SWAPS), default="11-44")
    sw.add_argument("--grid", required=True, help="switch-time grid start:stop:step")
    sw.add_argument("--workers", type=int, default=None)
    sw.set_defaults(func=cmd_sweep)

    ws = sub.add_parser("werner-scan", parents=[common], help="Werner verdicts at m=n=0")
    ws.add_argument("--grid", default="0.34:1:0.01", help="weight grid start:stop:step")
    ws.add_argument("--family", choices=("singlet", "triplet", "both"), default="both")
    ws.set_defaults(func=cmd_werner_scan)

    va = sub.add_parser("validate", parents=[common], help="check a state and report minors")
    va.set_defaults(func=cmd_validate)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"esdlab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (EsdLabError, ValueError, ArithmeticError, OSError) as exc:
        print(f"esdlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
