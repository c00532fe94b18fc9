"""Parameter sweeps, critical-speed search, and result serialization.

Grid points are independent tasks; a worker pool may execute them in any
order and the aggregation step re-sorts into the declared ordering
(N-major, upsilon-minor, kappa-major for time series) before anything is
written, so output files are byte-identical no matter how many workers
ran.  Floats are serialized with repr, the shortest decimal that parses
back to the same double.

A failing grid point never aborts a sweep: the record is marked FAILED
(status field, kept in JSON output; CSV rows carry nan observables) and
the sweep continues.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .closed import (IntegratorConfig, check_truncation, density_from_state,
                     evolve_closed, fidelity, initial_state,
                     qubit_entropy_series)
from .errors import (EmptyPayloadError, NoMinimumError, OutputError,
                     SimulationError, TruncationOverflowError)
from .lindblad import (DensityMatrix, OpenParams, evolve_open,
                       log_negativity, negativity, purity)
from .model import ModelParams, PulseProfile, build_space

__all__ = [
    "SweepGrid",
    "SweepRecord",
    "UStarResult",
    "EntropyMap",
    "NegativityTrace",
    "default_upsilon_grid",
    "DEFAULT_KAPPA_GRID",
    "sweep_fidelity",
    "find_ustar",
    "entropy_map",
    "negativity_trace",
    "write_results",
    "read_records",
    "FIDELITY_COLUMNS",
    "ENTROPY_COLUMNS",
    "NEGATIVITY_COLUMNS",
]

DEFAULT_KAPPA_GRID = (0.0, 0.01, 0.05, 0.1, 0.2)
N_MAX_START = 40
N_MAX_CEILING = 1280

FIDELITY_COLUMNS = ("n_attackers", "upsilon", "n_max_used", "fidelity_final",
                    "entropy_final", "entropy_max", "truncation_tail",
                    "norm_drift")
OPEN_RECORD_COLUMNS = ("n_attackers", "upsilon", "n_max_used", "fidelity_final",
                       "entropy_final", "entropy_max", "kappa",
                       "negativity_final", "log_negativity_final",
                       "purity_final", "truncation_tail", "norm_drift")
ENTROPY_COLUMNS = ("n_attackers", "upsilon", "time", "lam", "entropy")
NEGATIVITY_COLUMNS = ("n_attackers", "upsilon", "kappa", "time", "lam",
                      "negativity", "log_negativity", "purity", "trace")


def default_upsilon_grid(lo: float = 0.05, hi: float = 5.0,
                         points: int = 60) -> np.ndarray:
    """Log-spaced speed grid covering the sudden and near-adiabatic limits."""
    return np.logspace(math.log10(lo), math.log10(hi), points)


@dataclass(frozen=True)
class SweepGrid:
    n_values: tuple
    upsilon_values: np.ndarray
    kappa_values: tuple = ()
    nbar: float = 0.0

    def __post_init__(self):
        if len(self.n_values) == 0:
            raise ValueError("n_values must be non-empty")
        u = np.asarray(self.upsilon_values, dtype=float)
        if u.size == 0 or np.any(np.diff(u) <= 0) or u[0] <= 0:
            raise ValueError("upsilon_values must be positive and strictly ascending")
        if self.nbar < 0 or any(k < 0 for k in self.kappa_values):
            raise ValueError("kappa and nbar must be >= 0")


@dataclass(frozen=True)
class SweepRecord:
    n_attackers: int
    upsilon: float
    n_max_used: int
    fidelity_final: float
    entropy_final: float
    entropy_max: float
    truncation_tail: float
    norm_drift: float
    kappa: float | None = None
    negativity_final: float | None = None
    log_negativity_final: float | None = None
    purity_final: float | None = None
    status: str = "OK"


@dataclass(frozen=True)
class UStarResult:
    upsilon_star: float
    fidelity_min: float
    n_max_used: int


@dataclass(frozen=True)
class EntropyMap:
    """Dense (upsilon, time) table of emitter-reduced entropy.

    rows has columns (upsilon, time, lam, entropy), time-minor within each
    upsilon.  Failed grid points contribute no rows; their status string
    says why.
    """

    n_attackers: int
    upsilon_values: np.ndarray
    rows: np.ndarray
    per_upsilon_max: np.ndarray
    n_max_used: np.ndarray
    status: tuple


@dataclass(frozen=True)
class NegativityTrace:
    """Per-kappa time series of entanglement through an open-system pulse.

    rows has columns (kappa, time, lam, negativity, log_negativity,
    purity, trace), time-minor within each kappa.
    """

    n_attackers: int
    upsilon: float
    n_max_used: int
    nbar: float
    kappa_values: tuple
    rows: np.ndarray
    status: tuple


# ---------------------------------------------------------------- engine glue

def _closed_run(n_attackers, upsilon, n_max, config, samples,
                phys=(1.0, 1.0, 1.0)):
    omega, epsilon, peak = phys
    params = ModelParams(n_attackers=n_attackers, omega=omega,
                         epsilon=epsilon, n_max=n_max)
    space = build_space(params)
    psi0 = initial_state(space)
    traj = evolve_closed(psi0, PulseProfile(speed=upsilon, peak=peak), config,
                         sample_count=samples, truncation_tol=None)
    return psi0, traj, fidelity(psi0, traj.final_state)


def _converged_point(n_attackers, upsilon, config, samples,
                     n_max_start=N_MAX_START, n_max_ceiling=N_MAX_CEILING,
                     fid_tol=1e-6, tail_tol=1e-8, phys=(1.0, 1.0, 1.0)):
    """Run at growing truncation until the tail check passes and the final
    fidelity is stable under doubling; returns the accepted run."""
    cache = {}

    def run(nm):
        if nm not in cache:
            cache[nm] = _closed_run(n_attackers, upsilon, nm, config, samples,
                                    phys)
        return cache[nm]

    n_max = n_max_start
    while True:
        psi0, traj, fid = run(n_max)
        if check_truncation(traj, tol=tail_tol).passed:
            _, _, fid2 = run(2 * n_max)
            if abs(fid - fid2) < fid_tol:
                return n_max, psi0, traj, fid
        if 2 * n_max > n_max_ceiling:
            raise TruncationOverflowError(
                f"no converged truncation below {n_max_ceiling} for "
                f"N={n_attackers}, upsilon={upsilon!r}")
        n_max *= 2


def _fidelity_record(n_attackers, upsilon, config, samples, n_max_start,
                     n_max_ceiling, phys):
    try:
        n_max, _, traj, fid = _converged_point(
            n_attackers, upsilon, config, samples, n_max_start, n_max_ceiling,
            phys=phys)
        entropy = qubit_entropy_series(traj)
        return SweepRecord(
            n_attackers=n_attackers, upsilon=float(upsilon), n_max_used=n_max,
            fidelity_final=fid, entropy_final=float(entropy[-1]),
            entropy_max=float(entropy.max()),
            truncation_tail=traj.truncation_tail, norm_drift=traj.norm_drift)
    except SimulationError as exc:
        return SweepRecord(
            n_attackers=n_attackers, upsilon=float(upsilon),
            n_max_used=n_max_start, fidelity_final=math.nan,
            entropy_final=math.nan, entropy_max=math.nan,
            truncation_tail=math.nan, norm_drift=math.nan,
            status=f"FAILED:{type(exc).__name__}")


def _fidelity_task(args):
    i_n, i_u, n, u, config, samples, n_max_start, n_max_ceiling, phys = args
    return i_n, i_u, _fidelity_record(n, u, config, samples, n_max_start,
                                      n_max_ceiling, phys)


def _run_tasks(fn, tasks, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


# ---------------------------------------------------------------- experiments

def sweep_fidelity(grid: SweepGrid, config: IntegratorConfig | None = None,
                   samples: int = 121, workers: int = 1,
                   n_max_start: int = N_MAX_START,
                   n_max_ceiling: int = N_MAX_CEILING, omega: float = 1.0,
                   epsilon: float = 1.0, peak: float = 1.0) -> list:
    """One record per (N, upsilon), N-major then upsilon-minor."""
    config = config or IntegratorConfig()
    phys = (float(omega), float(epsilon), float(peak))
    u = np.asarray(grid.upsilon_values, dtype=float)
    tasks = [(i_n, i_u, int(n), float(u[i_u]), config, samples, n_max_start,
              n_max_ceiling, phys)
             for i_n, n in enumerate(grid.n_values)
             for i_u in range(len(u))]
    results = _run_tasks(_fidelity_task, tasks, workers)
    results.sort(key=lambda r: (r[0], r[1]))
    return [rec for _, _, rec in results]


def find_ustar(n_attackers: int, bracket=(0.05, 5.0), refine_tol: float = 1e-3,
               config: IntegratorConfig | None = None, coarse_points: int = 60,
               n_max_start: int = N_MAX_START, omega: float = 1.0,
               epsilon: float = 1.0) -> UStarResult:
    """Locate the pulse speed of minimum final fidelity.

    A coarse log-spaced scan over the bracket finds the neighborhood; the
    minimum must be interior (a monotone scan raises NoMinimumError).
    Golden-section refinement then narrows it in log-upsilon down to the
    relative tolerance, and the result is re-verified at doubled
    truncation.
    """
    config = config or IntegratorConfig()
    phys = (float(omega), float(epsilon), 1.0)
    lo, hi = bracket
    if not (0 < lo < hi):
        raise ValueError("bracket must satisfy 0 < lo < hi")
    grid = np.logspace(math.log10(lo), math.log10(hi), coarse_points)
    coarse = [_closed_run(n_attackers, float(v), n_max_start, config, 41,
                          phys)[2]
              for v in grid]
    k = int(np.argmin(coarse))
    if k == 0 or k == len(grid) - 1:
        raise NoMinimumError(
            f"fidelity is monotone over {bracket} for N={n_attackers}")

    n_max, _, _, _ = _converged_point(n_attackers, float(grid[k]), config, 41,
                                      n_max_start, phys=phys)

    def f_of(logv):
        return _closed_run(n_attackers, float(math.exp(logv)), n_max,
                           config, 2, phys)[2]

    a, b = math.log(grid[k - 1]), math.log(grid[k + 1])
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f_of(c), f_of(d)
    while (b - a) > math.log1p(refine_tol):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f_of(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f_of(d)
    ustar = math.exp(0.5 * (a + b))
    n_max_final, _, _, fmin = _converged_point(n_attackers, ustar, config, 41,
                                               n_max, phys=phys)
    return UStarResult(upsilon_star=ustar, fidelity_min=fmin,
                       n_max_used=n_max_final)


def _entropy_task(args):
    i_u, n, u, config, samples, n_max_start, phys = args
    try:
        n_max, _, traj, _ = _converged_point(n, u, config, samples,
                                             n_max_start, phys=phys)
        s = qubit_entropy_series(traj)
        rows = np.column_stack([np.full(len(traj), u), traj.times,
                                traj.lambdas, s])
        return i_u, rows, float(s.max()), n_max, "OK"
    except SimulationError as exc:
        return i_u, np.empty((0, 4)), math.nan, n_max_start, \
            f"FAILED:{type(exc).__name__}"


def entropy_map(n_attackers: int, upsilon_values, samples_per_trajectory: int = 121,
                config: IntegratorConfig | None = None, workers: int = 1,
                n_max_start: int = N_MAX_START, omega: float = 1.0,
                epsilon: float = 1.0, peak: float = 1.0) -> EntropyMap:
    """Emitter entropy over the (speed, time) plane, with per-speed maxima."""
    config = config or IntegratorConfig()
    phys = (float(omega), float(epsilon), float(peak))
    u = np.asarray(upsilon_values, dtype=float)
    tasks = [(i, int(n_attackers), float(u[i]), config,
              samples_per_trajectory, n_max_start, phys) for i in range(len(u))]
    results = _run_tasks(_entropy_task, tasks, workers)
    results.sort(key=lambda r: r[0])
    rows = np.vstack([r[1] for r in results]) if results else np.empty((0, 4))
    return EntropyMap(
        n_attackers=int(n_attackers), upsilon_values=u, rows=rows,
        per_upsilon_max=np.array([r[2] for r in results]),
        n_max_used=np.array([r[3] for r in results], dtype=int),
        status=tuple(r[4] for r in results))


def _negativity_task(args):
    i_k, n, u, kappa, nbar, n_max, config, samples, phys = args
    omega, epsilon, peak = phys
    params = ModelParams(n_attackers=n, omega=omega, epsilon=epsilon,
                         n_max=n_max)
    space = build_space(params)
    rho0 = density_from_state(initial_state(space))
    out = np.empty((samples, 7))

    def observe(k, t, lam, rho):
        dm = DensityMatrix(space, rho)
        out[k] = (kappa, t, lam, negativity(dm), log_negativity(dm),
                  purity(dm), float(np.trace(rho).real))

    try:
        evolve_open(rho0, PulseProfile(speed=u, peak=peak),
                    OpenParams(kappa=kappa, nbar=nbar),
                    config, sample_count=samples, keep_states=False,
                    observer=observe)
        return i_k, out, "OK"
    except SimulationError as exc:
        return i_k, np.empty((0, 7)), f"FAILED:{type(exc).__name__}"


def negativity_trace(n_attackers: int, upsilon: float,
                     kappa_values=DEFAULT_KAPPA_GRID, nbar: float = 0.0,
                     samples: int = 41, config: IntegratorConfig | None = None,
                     n_max: int | None = None, workers: int = 1,
                     omega: float = 1.0, epsilon: float = 1.0,
                     peak: float = 1.0,
                     n_max_start: int = N_MAX_START) -> NegativityTrace:
    """Open-system entanglement time series, one per kappa.

    n_max=None derives the truncation from the closed run at the same
    (N, upsilon) via the doubling policy; damping only lowers the photon
    excursion, and the tail diagnostic still guards every open run.  An
    explicit n_max skips the policy (the per-run tail check remains).
    """
    config = config or IntegratorConfig()
    phys = (float(omega), float(epsilon), float(peak))
    if n_max is None:
        n_max = _converged_point(n_attackers, float(upsilon), config, 41,
                                 n_max_start, phys=phys)[0]
    tasks = [(i, int(n_attackers), float(upsilon), float(k), float(nbar),
              int(n_max), config, samples, phys)
             for i, k in enumerate(kappa_values)]
    results = _run_tasks(_negativity_task, tasks, workers)
    results.sort(key=lambda r: r[0])
    rows = np.vstack([r[1] for r in results]) if results else np.empty((0, 7))
    return NegativityTrace(
        n_attackers=int(n_attackers), upsilon=float(upsilon),
        n_max_used=int(n_max), nbar=float(nbar),
        kappa_values=tuple(float(k) for k in kappa_values), rows=rows,
        status=tuple(r[2] for r in results))


# ------------------------------------------------------------- serialization

def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return repr(float(x))


def _records_table(records):
    has_open = any(r.kappa is not None for r in records)
    cols = OPEN_RECORD_COLUMNS if has_open else FIDELITY_COLUMNS
    rows = [[getattr(r, c) for c in cols] for r in records]
    return cols, rows


def _payload_table(payload):
    if isinstance(payload, EntropyMap):
        rows = [[payload.n_attackers] + list(r) for r in payload.rows]
        return ENTROPY_COLUMNS, rows
    traces = payload if isinstance(payload, (list, tuple)) else [payload]
    if all(isinstance(t, NegativityTrace) for t in traces):
        rows = []
        for t in traces:
            for r in t.rows:
                rows.append([t.n_attackers, t.upsilon] + list(r))
        return NEGATIVITY_COLUMNS, rows
    raise TypeError(f"cannot serialize payload of type {type(payload)!r}")


def _to_csv_text(payload):
    if isinstance(payload, (list, tuple)) and payload \
            and isinstance(payload[0], SweepRecord):
        cols, rows = _records_table(payload)
    else:
        cols, rows = _payload_table(payload)
    if not rows:
        raise EmptyPayloadError("no rows to write")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _to_json_text(payload):
    if isinstance(payload, (list, tuple)) and payload \
            and isinstance(payload[0], SweepRecord):
        body = {"kind": "sweep_records",
                "records": [asdict(r) for r in payload]}
    elif isinstance(payload, EntropyMap):
        body = {"kind": "entropy_map", "n_attackers": payload.n_attackers,
                "columns": list(ENTROPY_COLUMNS[1:]),
                "rows": payload.rows.tolist(),
                "per_upsilon_max": payload.per_upsilon_max.tolist(),
                "n_max_used": payload.n_max_used.tolist(),
                "status": list(payload.status)}
    else:
        traces = payload if isinstance(payload, (list, tuple)) else [payload]
        if not all(isinstance(t, NegativityTrace) for t in traces):
            raise TypeError(f"cannot serialize payload of type {type(payload)!r}")
        body = {"kind": "negativity_traces",
                "traces": [{"n_attackers": t.n_attackers, "upsilon": t.upsilon,
                            "n_max_used": t.n_max_used, "nbar": t.nbar,
                            "kappa_values": list(t.kappa_values),
                            "columns": list(NEGATIVITY_COLUMNS[2:]),
                            "rows": t.rows.tolist(),
                            "status": list(t.status)} for t in traces]}
    if body.get("records") == [] or body.get("rows") == []:
        raise EmptyPayloadError("no rows to write")
    return json.dumps(body, indent=1) + "\n"


def write_results(payload, path=None, fmt: str = "csv") -> None:
    """Serialize records or tables; CSV column order is fixed per payload
    kind and floats round-trip exactly.  Refuses empty payloads before
    touching the filesystem; overwrites atomically otherwise.  path=None
    writes to stdout."""
    if isinstance(payload, (list, tuple)) and len(payload) == 0:
        raise EmptyPayloadError("refusing to write an empty result set")
    if fmt == "csv":
        text = _to_csv_text(payload)
    elif fmt == "json":
        text = _to_json_text(payload)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is None:
        sys.stdout.write(text)
        return
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            if os.path.exists(tmp):
                os.remove(tmp)
        except OSError:
            pass
        raise OutputError(f"cannot write {path}: {exc}") from exc


def read_records(path) -> list:
    """Parse a fidelity-sweep CSV back into records (field-for-field for
    every serialized column; status is not a CSV column)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header not in (FIDELITY_COLUMNS, OPEN_RECORD_COLUMNS):
            raise OutputError(f"unrecognized header in {path}")
        out = []
        for row in reader:
            vals = dict(zip(header, row))
            out.append(SweepRecord(
                n_attackers=int(vals["n_attackers"]),
                upsilon=float(vals["upsilon"]),
                n_max_used=int(vals["n_max_used"]),
                fidelity_final=float(vals["fidelity_final"]),
                entropy_final=float(vals["entropy_final"]),
                entropy_max=float(vals["entropy_max"]),
                truncation_tail=float(vals["truncation_tail"]),
                norm_drift=float(vals["norm_drift"]),
                kappa=float(vals["kappa"]) if vals.get("kappa") else None,
                negativity_final=float(vals["negativity_final"])
                if vals.get("negativity_final") else None,
                log_negativity_final=float(vals["log_negativity_final"])
                if vals.get("log_negativity_final") else None,
                purity_final=float(vals["purity_final"])
                if vals.get("purity_final") else None))
    return out
