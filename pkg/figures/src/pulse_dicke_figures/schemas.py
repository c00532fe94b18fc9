"""Loaders for the three sweep CSV schemas.

The headers are pinned byte for byte.  A missing, extra, or reordered
column is a hard SchemaMismatchError naming the offending columns, never
a silent reinterpretation; a header-only file is an EmptyTableError.
These loaders are the only coupling to the simulator package: the files
are the contract.
"""

import csv

import numpy as np

__all__ = [
    "FIDELITY_HEADER",
    "ENTROPY_HEADER",
    "NEGATIVITY_HEADER",
    "SchemaMismatchError",
    "EmptyTableError",
    "FigureDataError",
    "load_table",
]

FIDELITY_HEADER = ("n_attackers", "upsilon", "n_max_used", "fidelity_final",
                   "entropy_final", "entropy_max", "truncation_tail",
                   "norm_drift")
ENTROPY_HEADER = ("n_attackers", "upsilon", "time", "lam", "entropy")
NEGATIVITY_HEADER = ("n_attackers", "upsilon", "kappa", "time", "lam",
                     "negativity", "log_negativity", "purity", "trace")


class SchemaMismatchError(Exception):
    """The CSV header or a row does not match the declared schema."""


class EmptyTableError(Exception):
    """The CSV has a valid header but no data rows."""


class FigureDataError(Exception):
    """The rows validate but cannot make the requested figure."""


def load_table(path, header):
    """Read one CSV against a pinned header, returning a float ndarray.

    Every cell is parsed as a float (nan is legal; failed sweep points
    carry nan observables).
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            got = tuple(next(reader))
        except StopIteration:
            raise SchemaMismatchError(f"{path}: file is empty, no header row")
        if got != header:
            missing = [c for c in header if c not in got]
            extra = [c for c in got if c not in header]
            parts = []
            if missing:
                parts.append("missing column(s) " + ", ".join(missing))
            if extra:
                parts.append("unexpected column(s) " + ", ".join(extra))
            if not parts:
                parts.append("columns out of order")
            raise SchemaMismatchError(f"{path}: {'; '.join(parts)}; "
                                      f"expected exactly {','.join(header)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise SchemaMismatchError(
                    f"{path}:{lineno}: {len(row)} cells, expected "
                    f"{len(header)}")
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise SchemaMismatchError(f"{path}:{lineno}: {exc}")
    if not rows:
        raise EmptyTableError(f"{path}: header only, nothing to plot")
    return np.asarray(rows, dtype=float)


def load_tables(paths, header):
    """Concatenate several CSVs sharing one schema."""
    return np.vstack([load_table(p, header) for p in paths])
