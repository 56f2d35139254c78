"""Dataset ingestion and result files."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyDatasetError, ParseError, PreconditionError

NOT_RATED = 99.0
CSV_HEADER = ("round", "mean_cum_regret", "std_cum_regret")


@dataclass
class RatingsMatrix:
    rows: np.ndarray  # U x d, entries in [0, 1]
    source_user_ids: np.ndarray  # original 0-based row index of each kept user
    raw_users: int = 0

    @property
    def shape(self):
        return self.rows.shape


def ingest_jester(path, d: int = 20) -> RatingsMatrix:
    """Load a Jester ratings CSV and keep the users who rated all of the first ``d`` jokes.

    Each row is ``n_rated, r_1, r_2, ...`` with ratings in [-10, 10] and 99
    meaning "not rated". Kept ratings are rescaled to (r + 10) / 20.
    """
    rows, ids = [], []
    raw = 0
    with open(path, newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or all(not tok.strip() for tok in rec):
                continue
            raw += 1
            if len(rec) < d + 1:
                raise ParseError(f"expected at least {d + 1} columns, got {len(rec)}", line=lineno)
            try:
                vals = np.array([float(tok) for tok in rec[1:d + 1]])
            except ValueError:
                raise ParseError("non-numeric rating", line=lineno) from None
            rated = vals != NOT_RATED
            if np.any(rated & ((vals < -10.0) | (vals > 10.0))):
                raise ParseError("rating outside [-10, 10]", line=lineno)
            if rated.all():
                rows.append((vals + 10.0) / 20.0)
                ids.append(raw - 1)
    if not rows:
        raise EmptyDatasetError(f"no user in {path} rated all of the first {d} jokes")
    return RatingsMatrix(np.vstack(rows), np.array(ids), raw)


def format_real(x: float) -> str:
    return f"{x:.9g}"


def write_results_csv(series, cfg, path) -> Path:
    """Write ``round,mean_cum_regret,std_cum_regret`` rows plus a JSON metadata sidecar.

    ``cfg`` is anything with a ``to_dict()`` (or a plain dict); it is stored
    verbatim next to the CSV so a run can be reproduced.
    """
    if len(series.mean) == 0:
        raise PreconditionError("empty regret series")
    path = Path(path)
    lines = [",".join(CSV_HEADER)]
    for t, (m, s) in enumerate(zip(series.mean, series.std), start=1):
        lines.append(f"{t},{format_real(m)},{format_real(s)}")
    path.write_text("\n".join(lines) + "\n")
    meta = cfg.to_dict() if hasattr(cfg, "to_dict") else dict(cfg)
    meta_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def meta_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def trace_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".trace.csv")


def write_trace_csv(trace, path) -> Path:
    """Per-round diagnostics of one game: play, rank, factorization error, exploration support, weight row."""
    cols = ("round", "action", "scalar_loss", "rank", "rel_error", "entropy", "log_support")
    lines = [",".join(cols + ("support", "weights"))]
    for rec in trace:
        vals = []
        for c in cols:
            v = rec.get(c, "")
            vals.append(format_real(v) if isinstance(v, float) else str(v))
        vals.append(";".join(str(i) for i in rec.get("support", ())))
        vals.append(";".join(format_real(x) for x in rec["weights"]))
        lines.append(",".join(vals))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path
