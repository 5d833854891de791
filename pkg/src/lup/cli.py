"""Command-line driver: ``python -m lup.cli {simulate,kernel,verify,limit-scan}``.

Every output file starts with the full run configuration and the package
version, so a run can be repeated from its output alone.  Floats are written
with Python's shortest round-trip representation.

CSV layout (``#`` lines are metadata)::

    # lup <version>
    # config {"command": ..., ...}
    <header row>
    <data rows>

JSON layout: ``{"config": {...}, "results": [...], "version": "..."}``.
Columns / record keys per command:

* simulate    trajectory_id, time, eigenvalue_index, value
* kernel      y, t, x, s, K
* verify      identity, params, observed_error, tolerance, passed, blocking, effort, details
* limit-scan  gamma, y, x, t, s, error
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .kernels import FAMILIES, KernelSpec, SpaceTimePoint, kernel_hermite, kernel_value
from .process import simulate_lup_eigenvalues
from .verify import LOG_GAMMA_SAFE, SCALING_POINTS, SUITES, run_suites, scaled_laguerre_kernel

__all__ = ["main", "build_parser", "COLUMNS", "JSON_SCHEMA"]

SCHEMA_VERSION = 1

COLUMNS = {
    "simulate": ["trajectory_id", "time", "eigenvalue_index", "value"],
    "kernel": ["y", "t", "x", "s", "K"],
    "verify": ["identity", "params", "observed_error", "tolerance", "passed", "blocking", "effort", "details"],
    "limit-scan": ["gamma", "y", "x", "t", "s", "error"],
}

_NUM = {"type": ["number", "string"]}  # non-finite floats are written as strings
_RECORD = {
    "simulate": {"trajectory_id": {"type": "integer"}, "time": {"type": "integer"}, "eigenvalue_index": {"type": "integer"}, "value": _NUM},
    "kernel": {k: _NUM for k in COLUMNS["kernel"]},
    "verify": {
        "identity": {"type": "string"},
        "params": {"type": "object"},
        "observed_error": _NUM,
        "tolerance": _NUM,
        "passed": {"type": "boolean"},
        "blocking": {"type": "boolean"},
        "effort": {"type": "integer"},
        "details": {"type": "object"},
    },
    "limit-scan": {k: _NUM for k in COLUMNS["limit-scan"]},
}

JSON_SCHEMA = {
    command: {
        "type": "object",
        "required": ["config", "results", "version"],
        "properties": {
            "config": {
                "type": "object",
                "required": ["command", "schema_version"],
                "properties": {"command": {"const": command}, "schema_version": {"const": SCHEMA_VERSION}},
            },
            "version": {"type": "string"},
            "results": {
                "type": "array",
                "items": {"type": "object", "required": COLUMNS[command], "properties": props, "additionalProperties": False},
            },
        },
    }
    for command, props in _RECORD.items()
}


class UsageError(ValueError):
    """Invalid command-line parameters; the message names the offending field."""


# ---------------------------------------------------------------- parsing

def _positive_int(name):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name}: expected an integer, got {text!r}") from None
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name}: must be a positive integer, got {v}")
        return v

    return conv


def _float_list(name):
    def conv(text):
        try:
            return [float(v) for v in text.replace(",", " ").split()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name}: expected numbers, got {text!r}") from None

    return conv


def _int_list(name):
    def conv(text):
        try:
            return [int(v) for v in text.replace(",", " ").split()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name}: expected integers, got {text!r}") from None

    return conv


def _common(p, formats=("csv", "json"), default_format="csv"):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive_int("--workers"), default=1)
    p.add_argument("--format", choices=formats, default=default_format)
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="python -m lup.cli", description="Laguerre unitary process toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate LUP paths and write eigenvalues")
    p.add_argument("--n", type=_positive_int("--n"), required=True)
    p.add_argument("--t-max", type=_positive_int("--t-max"), required=True)
    p.add_argument("--times", type=_int_list("--times"), default=None, help="record times (default: 1..t-max)")
    p.add_argument("--trajectories", type=_positive_int("--trajectories"), default=100)
    _common(p)

    p = sub.add_parser("kernel", help="tabulate a kernel on a grid")
    p.add_argument("--family", choices=FAMILIES, default="laguerre_extended")
    p.add_argument("--n", type=_positive_int("--n"), default=1)
    p.add_argument("--times", type=_float_list("--times"), default=[1.0], help="t or 't,s' (s defaults to t)")
    p.add_argument("--grid", type=_float_list("--grid"), default=[0.0, 10.0, 101], help="'lo,hi,count' for y (write --grid=-3,3,61 for a negative lo)")
    p.add_argument("--x", type=float, default=None, help="fixed column position; omit to tabulate the diagonal x = y")
    p.add_argument("--tol", type=float, default=1e-10)
    _common(p)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", action="append", default=None, help=f"suite name(s), comma separated; any of {', '.join(SUITES)}")
    p.add_argument("--tol", type=float, default=None, help="override every tolerance")
    p.add_argument("--quick", action="store_true", help="smaller Monte Carlo sample sizes")
    _common(p, default_format="json")

    p = sub.add_parser("limit-scan", help="scaled Laguerre kernel error against the Hermite limit")
    p.add_argument("--n", type=_positive_int("--n"), default=1)
    p.add_argument("--gamma", type=_float_list("--gamma"), default=[1e2, 1e3, 1e4])
    p.add_argument("--point", type=_float_list("--point"), action="append", default=None, help="'y,x,t,s' (repeatable)")
    _common(p)
    return parser


# ---------------------------------------------------------------- commands

def _cmd_simulate(args, config):
    times = sorted(set(args.times)) if args.times else list(range(1, args.t_max + 1))
    bad = [t for t in times if not 1 <= t <= args.t_max]
    if bad:
        raise UsageError(f"--times: {bad} outside [1, {args.t_max}]")
    config["times"] = times
    ev = simulate_lup_eigenvalues(args.n, args.t_max, times, args.trajectories, args.seed, workers=args.workers)
    rows = []
    for i in range(args.trajectories):
        for j, t in enumerate(times):
            for k in range(args.n):
                rows.append([i, t, k, float(ev[i, j, k])])
    return rows, 0


def _cmd_kernel(args, config):
    if len(args.times) not in (1, 2):
        raise UsageError("--times: give t or t,s")
    t = args.times[0]
    s = args.times[1] if len(args.times) == 2 else t
    if len(args.grid) != 3 or int(args.grid[2]) != args.grid[2] or args.grid[2] < 1:
        raise UsageError("--grid: expected lo,hi,count with integer count >= 1")
    if args.family == "laguerre_extended" and (t != int(t) or s != int(s) or min(t, s) < 1):
        raise UsageError(f"--times: laguerre_extended needs integer times >= 1, got t={t}, s={s}")
    try:
        spec = KernelSpec(args.family, args.n, args.tol)
    except ValueError as exc:
        raise UsageError(f"--tol/--n: {exc}") from None
    config.update(t=t, s=s)
    ys = np.linspace(args.grid[0], args.grid[1], int(args.grid[2]))
    rows = []
    for y in ys:
        x = float(y) if args.x is None else args.x
        k = kernel_value(SpaceTimePoint(float(y), t), SpaceTimePoint(x, s), spec)
        rows.append([float(y), t, x, s, float(k)])
    return rows, 0


def _cmd_verify(args, config):
    names = []
    for item in args.suite or []:
        names.extend(n for n in item.split(",") if n)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"--suite: unknown {unknown}; choose from {list(SUITES)}")
    config["suite"] = names or list(SUITES)
    reports = run_suites(names or None, seed=args.seed, workers=args.workers, tolerance=args.tol, quick=args.quick)
    rows = []
    failed = False
    for r in reports:
        d = r.to_dict(timing=False)
        rows.append([d[c] for c in COLUMNS["verify"]])
        print(r.line(), file=sys.stderr)
        failed |= r.blocking and not r.passed
    return rows, int(failed)


def _cmd_limit_scan(args, config):
    gammas = args.gamma
    if not gammas:
        raise UsageError("--gamma: the gamma list is empty")
    if any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise UsageError("--gamma: values must be strictly ascending")
    if args.point:
        points = args.point
        if any(len(p) != 4 for p in points):
            raise UsageError("--point: expected y,x,t,s")
    else:
        points = SCALING_POINTS.get(args.n, SCALING_POINTS[1])
    points = [tuple(float(v) for v in p) for p in points]
    for g in gammas:
        for y, x, t, s in points:
            if args.n * (g * max(t, s) - 1) > LOG_GAMMA_SAFE:
                raise UsageError(f"--gamma: {g:g} exceeds the validated range N(gamma t - 1) <= {LOG_GAMMA_SAFE:.0e}")
            for v in (g * t, g * s):
                if abs(v - round(v)) > 1e-9:
                    raise UsageError(f"--gamma: gamma*t = {v:g} is not an integer")
    config["points"] = [list(p) for p in points]
    rows = []
    for y, x, t, s in points:
        target = kernel_hermite(SpaceTimePoint(y, t), SpaceTimePoint(x, s), args.n, 1e-14)
        for g in gammas:
            err = abs(scaled_laguerre_kernel(args.n, g, y, x, t, s) - target)
            rows.append([g, y, x, t, s, err])
    return rows, 0


_COMMANDS = {"simulate": _cmd_simulate, "kernel": _cmd_kernel, "verify": _cmd_verify, "limit-scan": _cmd_limit_scan}


# ---------------------------------------------------------------- output

def _clean(v):
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (dict, list)):
        text = json.dumps(_clean(v), sort_keys=True, separators=(",", ":"))
        return '"' + text.replace('"', '""') + '"'
    return str(v)


def render(command: str, config: dict, rows: list, fmt: str) -> str:
    cols = COLUMNS[command]
    if fmt == "json":
        doc = {"config": _clean(config), "results": [_clean(dict(zip(cols, r))) for r in rows], "version": __version__}
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    lines = [f"# lup {__version__}", "# config " + json.dumps(_clean(config), sort_keys=True), ",".join(cols)]
    lines += [",".join(_cell(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {k: v for k, v in vars(args).items() if k != "out"}
    config["schema_version"] = SCHEMA_VERSION
    try:
        rows, code = _COMMANDS[args.command](args, config)
    except UsageError as exc:
        parser.error(str(exc))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = render(args.command, config, rows, args.format)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write --out {args.out!r}: {exc.strerror}", file=sys.stderr)
            return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
