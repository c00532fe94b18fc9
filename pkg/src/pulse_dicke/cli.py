"""Command-line front end: sweeps, the critical-speed search, entropy and
negativity tables, and the self-validation suite.

Configuration resolution order is defaults, then a JSON config file
(--config), then explicit flags; --print-config echoes the fully resolved
configuration as JSON, and that JSON can be fed back as a config file to
reproduce the identical run.  Unknown config keys are rejected.

Exit codes: 0 full success, 1 usage or I/O error, 2 when the tooling ran
fine but a grid point failed, a self-check failed, or no fidelity minimum
exists in the bracket.  Progress goes to stderr; results go only to the
declared output path (or stdout when no path is given).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .closed import IntegratorConfig
from .errors import (EmptyPayloadError, NoMinimumError, OutputError,
                     SimulationError)
from .sweeps import (DEFAULT_KAPPA_GRID, N_MAX_START, SweepGrid, entropy_map,
                     find_ustar, negativity_trace, sweep_fidelity,
                     write_results)
from .validate import run_validation

__all__ = ["main", "parse_config", "UsageError"]

COMMANDS = ("sweep-fidelity", "entropy-map", "negativity-trace", "find-ustar",
            "validate")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------- field validation

def _vint(lo, what):
    def conv(v):
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise ValueError(f"{what} must be an integer")
        if v < lo:
            raise ValueError(f"{what} must be >= {lo}")
        return int(v)
    return conv


def _vfloat(lo, what, strict=False):
    def conv(v):
        if isinstance(v, bool) or not isinstance(v, (int, float, np.floating)):
            raise ValueError(f"{what} must be a number")
        v = float(v)
        if v < lo or (strict and v == lo):
            raise ValueError(f"{what} must be {'>' if strict else '>='} {lo}")
        return v
    return conv


def _vlist(item_conv):
    def conv(v):
        if not isinstance(v, (list, tuple)):
            raise ValueError("expected a list")
        if not v:
            raise ValueError("list must be non-empty")
        return [item_conv(x) for x in v]
    return conv


def _vchoice(choices):
    def conv(v):
        if v not in choices:
            raise ValueError(f"must be one of {', '.join(choices)}")
        return v
    return conv


def _vpath(v):
    if v is not None and not isinstance(v, str):
        raise ValueError("must be a path string")
    return v


def _vopt(conv):
    return lambda v: None if v is None else conv(v)


_N_ITEM = _vint(1, "n_attackers")
_COMMON = [
    ("steps_per_unit_time", 2000, _vint(100, "steps per unit time")),
    ("out", None, _vpath),
    ("format", "csv", _vchoice(("csv", "json"))),
    ("workers", None, _vopt(_vint(1, "workers"))),
    ("omega", 1.0, _vfloat(0.0, "omega", strict=True)),
    ("epsilon", 1.0, _vfloat(0.0, "epsilon", strict=True)),
]

SCHEMAS = {
    "sweep-fidelity": [
        ("n", [3], _vlist(_N_ITEM)),
        ("upsilon_min", 0.05, _vfloat(0.0, "upsilon_min", strict=True)),
        ("upsilon_max", 5.0, _vfloat(0.0, "upsilon_max", strict=True)),
        ("upsilon_points", 60, _vint(2, "upsilon_points")),
        ("peak", 1.0, _vfloat(0.0, "peak")),
        ("samples", 121, _vint(2, "samples")),
        ("n_max_start", N_MAX_START, _vint(1, "n_max_start")),
    ] + _COMMON,
    "entropy-map": [
        ("n", 3, _N_ITEM),
        ("upsilon_min", 0.05, _vfloat(0.0, "upsilon_min", strict=True)),
        ("upsilon_max", 5.0, _vfloat(0.0, "upsilon_max", strict=True)),
        ("upsilon_points", 60, _vint(2, "upsilon_points")),
        ("peak", 1.0, _vfloat(0.0, "peak")),
        ("samples", 121, _vint(2, "samples")),
        ("n_max_start", N_MAX_START, _vint(1, "n_max_start")),
    ] + _COMMON,
    "negativity-trace": [
        ("n", [5, 11], _vlist(_N_ITEM)),
        ("upsilon", 0.25, _vfloat(0.0, "upsilon", strict=True)),
        ("kappa", list(DEFAULT_KAPPA_GRID), _vlist(_vfloat(0.0, "kappa"))),
        ("nbar", 0.0, _vfloat(0.0, "nbar")),
        ("peak", 1.0, _vfloat(0.0, "peak")),
        ("samples", 41, _vint(2, "samples")),
        ("n_max", None, _vopt(_vint(1, "n_max"))),
        ("n_max_start", N_MAX_START, _vint(1, "n_max_start")),
    ] + _COMMON,
    "find-ustar": [
        ("n", 3, _N_ITEM),
        ("bracket_lo", 0.05, _vfloat(0.0, "bracket_lo", strict=True)),
        ("bracket_hi", 5.0, _vfloat(0.0, "bracket_hi", strict=True)),
        ("refine_tol", 1e-3, _vfloat(0.0, "refine_tol", strict=True)),
        ("coarse_points", 60, _vint(3, "coarse_points")),
        ("n_max_start", N_MAX_START, _vint(1, "n_max_start")),
        ("steps_per_unit_time", 2000, _vint(100, "steps per unit time")),
        ("out", None, _vpath),
        ("omega", 1.0, _vfloat(0.0, "omega", strict=True)),
        ("epsilon", 1.0, _vfloat(0.0, "epsilon", strict=True)),
    ],
    "validate": [],
}

CONFLICTS = {"negativity-trace": (("n_max", "n_max_start"),)}


def _build_parser():
    top = _Parser(prog="pulse-dicke",
                  description="Coordinated-pulse attack simulator for a "
                              "qubit group coupled to a boson mode.")
    sub = top.add_subparsers(dest="command", metavar="command",
                             parser_class=_Parser)
    sub.required = True

    def add(p, cmd, field):
        flag = "--" + field.replace("_", "-")
        if field == "n":
            multi = isinstance(dict(_schema_defaults(cmd))["n"], list)
            p.add_argument(flag, dest=field, type=int,
                           nargs="+" if multi else None, default=None,
                           help="number of attacking qubits")
        elif field == "kappa":
            p.add_argument(flag, dest=field, type=float, nargs="+",
                           default=None, help="cavity damping rates")
        elif field in ("out", "format"):
            p.add_argument(flag, dest=field, default=None)
        elif field in ("upsilon_points", "samples", "workers", "n_max",
                       "n_max_start", "steps_per_unit_time", "coarse_points"):
            p.add_argument(flag, dest=field, type=int, default=None)
        else:
            p.add_argument(flag, dest=field, type=float, default=None)

    for cmd in COMMANDS:
        p = sub.add_parser(cmd, prog=f"pulse-dicke {cmd}")
        p.add_argument("--config", default=None,
                       help="JSON config file; flags override its values")
        p.add_argument("--print-config", action="store_true",
                       help="echo the resolved configuration and exit")
        for field, _, _ in SCHEMAS[cmd]:
            add(p, cmd, field)
    return top


def _schema_defaults(cmd):
    return [(f, d) for f, d, _ in SCHEMAS[cmd]]


def _default_workers():
    env = os.environ.get("PULSE_DICKE_WORKERS")
    if env is not None:
        try:
            w = int(env)
        except ValueError:
            raise UsageError(f"PULSE_DICKE_WORKERS must be an integer, "
                             f"got {env!r}")
        if w < 1:
            raise UsageError("PULSE_DICKE_WORKERS must be >= 1")
        return w
    return os.cpu_count() or 1


def parse_config(argv=None):
    """Resolve argv plus optional config file into (command, config dict,
    print_only flag).  Raises UsageError with the offending flag or key
    named."""
    args = _build_parser().parse_args(argv)
    cmd = args.command
    schema = SCHEMAS[cmd]
    fields = [f for f, _, _ in schema]
    resolved = {f: d for f, d, _ in schema}
    explicit = set()

    if args.config is not None:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise UsageError(f"--config: cannot read {args.config}: {exc}")
        except json.JSONDecodeError as exc:
            raise UsageError(f"--config: invalid JSON in {args.config}: {exc}")
        if not isinstance(data, dict):
            raise UsageError("--config: top level must be a JSON object")
        file_cmd = data.pop("command", cmd)
        if file_cmd != cmd:
            raise UsageError(f"--config: file is for command {file_cmd!r}, "
                             f"not {cmd!r}")
        for key, value in data.items():
            if key not in fields:
                raise UsageError(f"--config: unknown key {key!r} for {cmd}")
            resolved[key] = value
            explicit.add(key)

    for field in fields:
        value = getattr(args, field)
        if value is not None:
            resolved[field] = value
            explicit.add(field)

    for field, _, conv in schema:
        try:
            resolved[field] = conv(resolved[field])
        except ValueError as exc:
            raise UsageError(f"--{field.replace('_', '-')}: {exc}")

    if "workers" in resolved and resolved["workers"] is None:
        resolved["workers"] = _default_workers()
    if "upsilon_min" in resolved \
            and resolved["upsilon_min"] >= resolved["upsilon_max"]:
        raise UsageError("--upsilon-min must be < --upsilon-max")
    if "bracket_lo" in resolved \
            and resolved["bracket_lo"] >= resolved["bracket_hi"]:
        raise UsageError("--bracket-lo must be < --bracket-hi")
    for a, b in CONFLICTS.get(cmd, ()):
        if a in explicit and b in explicit:
            raise UsageError(
                f"conflicting flags: --{a.replace('_', '-')} and "
                f"--{b.replace('_', '-')} are mutually exclusive")
    return cmd, resolved, bool(args.print_config)


# ------------------------------------------------------------- dispatchers

def _upsilon_grid(cfg):
    return np.logspace(np.log10(cfg["upsilon_min"]),
                       np.log10(cfg["upsilon_max"]), cfg["upsilon_points"])


def _integrator(cfg):
    return IntegratorConfig(steps_per_unit_time=cfg["steps_per_unit_time"])


def _report_failures(statuses):
    failed = [s for s in statuses if s != "OK"]
    if failed:
        print(f"{len(failed)} of {len(statuses)} grid points FAILED",
              file=sys.stderr)
        return 2
    return 0


def _run_sweep_fidelity(cfg):
    grid = SweepGrid(n_values=tuple(cfg["n"]), upsilon_values=_upsilon_grid(cfg))
    total = len(cfg["n"]) * cfg["upsilon_points"]
    print(f"sweep-fidelity: {total} grid points, workers={cfg['workers']}",
          file=sys.stderr)
    records = sweep_fidelity(grid, _integrator(cfg), samples=cfg["samples"],
                             workers=cfg["workers"],
                             n_max_start=cfg["n_max_start"],
                             omega=cfg["omega"], epsilon=cfg["epsilon"],
                             peak=cfg["peak"])
    write_results(records, cfg["out"], cfg["format"])
    return _report_failures([r.status for r in records])


def _run_entropy_map(cfg):
    print(f"entropy-map: N={cfg['n']}, {cfg['upsilon_points']} speeds, "
          f"workers={cfg['workers']}", file=sys.stderr)
    table = entropy_map(cfg["n"], _upsilon_grid(cfg),
                        samples_per_trajectory=cfg["samples"],
                        config=_integrator(cfg), workers=cfg["workers"],
                        n_max_start=cfg["n_max_start"], omega=cfg["omega"],
                        epsilon=cfg["epsilon"], peak=cfg["peak"])
    write_results(table, cfg["out"], cfg["format"])
    return _report_failures(list(table.status))


def _run_negativity_trace(cfg):
    traces = []
    statuses = []
    for n in cfg["n"]:
        print(f"negativity-trace: N={n}, upsilon={cfg['upsilon']}, "
              f"{len(cfg['kappa'])} kappas", file=sys.stderr)
        trace = negativity_trace(n, cfg["upsilon"],
                                 kappa_values=tuple(cfg["kappa"]),
                                 nbar=cfg["nbar"], samples=cfg["samples"],
                                 config=_integrator(cfg), n_max=cfg["n_max"],
                                 workers=cfg["workers"], omega=cfg["omega"],
                                 epsilon=cfg["epsilon"], peak=cfg["peak"],
                                 n_max_start=cfg["n_max_start"])
        traces.append(trace)
        statuses.extend(trace.status)
    write_results(traces, cfg["out"], cfg["format"])
    return _report_failures(statuses)


def _run_find_ustar(cfg):
    print(f"find-ustar: N={cfg['n']}, bracket=({cfg['bracket_lo']}, "
          f"{cfg['bracket_hi']})", file=sys.stderr)
    result = find_ustar(cfg["n"], (cfg["bracket_lo"], cfg["bracket_hi"]),
                        refine_tol=cfg["refine_tol"],
                        config=_integrator(cfg),
                        coarse_points=cfg["coarse_points"],
                        n_max_start=cfg["n_max_start"], omega=cfg["omega"],
                        epsilon=cfg["epsilon"])
    line = json.dumps({"n_attackers": cfg["n"],
                       "upsilon_star": result.upsilon_star,
                       "fidelity_min": result.fidelity_min,
                       "n_max_used": result.n_max_used}) + "\n"
    if cfg["out"] is None:
        sys.stdout.write(line)
    else:
        try:
            with open(cfg["out"], "w") as fh:
                fh.write(line)
        except OSError as exc:
            raise OutputError(f"cannot write {cfg['out']}: {exc}") from exc
    return 0


def _run_validate(cfg):
    def progress(r):
        print(f"{'ok  ' if r.passed else 'FAIL'} {r.name}: {r.detail}",
              flush=True)

    results = run_validation(progress=progress)
    bad = sum(1 for r in results if not r.passed)
    print(f"validate: {len(results) - bad}/{len(results)} checks passed",
          file=sys.stderr)
    return 0 if bad == 0 else 2


_DISPATCH = {
    "sweep-fidelity": _run_sweep_fidelity,
    "entropy-map": _run_entropy_map,
    "negativity-trace": _run_negativity_trace,
    "find-ustar": _run_find_ustar,
    "validate": _run_validate,
}


def main(argv=None) -> int:
    try:
        cmd, cfg, print_only = parse_config(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if print_only:
        print(json.dumps({"command": cmd, **cfg}, indent=2, sort_keys=True))
        return 0
    try:
        return _DISPATCH[cmd](cfg)
    except NoMinimumError as exc:
        print(f"no minimum: {exc}", file=sys.stderr)
        return 2
    except (OutputError, EmptyPayloadError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SimulationError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
