"""CSV writers with fixed column orders.

Floats are written with 17 significant digits so every value round-trips.
Randomized outputs start with a ``# seed=...`` comment line.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

__all__ = ["HEADERS", "write_columns", "write_rows", "fmt"]

# column order of every CSV artifact
HEADERS = {
    "table": ["t", "s", "sigma", "n", "l", "m"],
    "deterministic": ["t", "i_bar", "a_bar", "b_bar", "r_bar"],
    "daily": ["day", "i_new", "r_new"],
    "pmf": ["k", "p"],
    "moments": ["t", "mean", "variance", "cv"],
    "oracle": ["k", "q"],
    "paths": ["path_id", "time", "kind", "population_after"],
    "summary_pmf": ["t", "k", "frequency"],
    "summary_snapshots": ["t", "extinct_fraction", "q05", "q50", "q95"],
    "summary_daily": [
        "day",
        "inf_mean", "inf_sd", "inf_q05", "inf_q50", "inf_q95",
        "rec_mean", "rec_sd", "rec_q05", "rec_q50", "rec_q95",
    ],
    "validation": ["number", "title", "passed", "seconds", "detail"],
}


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_rows(path, header, rows, seed=None) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        if seed is not None:
            fh.write(f"# seed={seed}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_columns(path, kind, columns, seed=None, trailer=None) -> Path:
    """Write equal-length ``columns`` under the fixed header of ``kind``.

    ``trailer`` is an extra final record such as ``("tail", 1e-9)``.
    """
    header = HEADERS[kind]
    if len(columns) != len(header):
        raise ValueError(f"{kind}: expected {len(header)} columns, got {len(columns)}")
    rows = zip(*[np.asarray(c).tolist() for c in columns])
    if trailer is not None:
        rows = list(rows) + [trailer]
    return write_rows(path, header, rows, seed)
