"""Summary statistics over trials."""

from __future__ import annotations

import math
import warnings
from collections import defaultdict

import numpy as np


class NonPositiveSample(ValueError):
    pass


class EmptyTable(ValueError):
    pass


def log_stats(samples) -> tuple[float, float]:
    """Sample mean and standard deviation (n - 1 denominator) of ``log10(samples)``.

    A single sample gives ``sigma = 0`` with a warning.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("no samples")
    if np.any(~(x > 0)):
        raise NonPositiveSample("log statistics need strictly positive samples")
    logs = np.log10(x)
    mu = float(np.mean(logs))
    if x.size == 1:
        warnings.warn("one sample: standard deviation set to 0", RuntimeWarning, stacklevel=2)
        return mu, 0.0
    return mu, float(np.std(logs, ddof=1))


def is_ok(row) -> bool:
    return str(row.get("status", "ok")).startswith("ok")


def _finite(row, key="rel_error"):
    v = float(row[key])
    return v if math.isfinite(v) else None


def summarize(rows, keys) -> list[dict]:
    """Group `rows` by `keys` and summarize ``rel_error`` per group.

    Output columns: the group keys, ``n``, ``median``, ``q1``, ``q3``,
    ``log_mean``, ``log_std``. Rows whose status is not ``ok*`` are ignored.
    """
    groups = defaultdict(list)
    order = []
    for row in rows:
        if not is_ok(row):
            continue
        v = _finite(row)
        if v is None:
            continue
        key = tuple(row[k] for k in keys)
        if key not in groups:
            order.append(key)
        groups[key].append(v)
    out = []
    for key in order:
        vals = np.asarray(groups[key])
        q1, med, q3 = np.percentile(vals, [25, 50, 75])
        if np.all(vals > 0) and vals.size >= 2:
            mu, sigma = log_stats(vals)
        elif np.all(vals > 0):
            mu, sigma = float(np.log10(vals[0])), 0.0
        else:
            mu, sigma = math.nan, math.nan
        rec = dict(zip(keys, key))
        rec.update(n=int(vals.size), median=float(med), q1=float(q1), q3=float(q3), log_mean=mu, log_std=sigma)
        out.append(rec)
    return out


def best_lambda(rows, level_id=None, statistic: str = "median") -> float:
    """Grid value of lambda with the smallest typical relative error.

    `statistic` is ``"median"`` or ``"logmean"`` (mean of log10 errors).
    Ties go to the smallest lambda.
    """
    if statistic not in ("median", "logmean"):
        raise ValueError(f"unknown statistic {statistic!r}")
    by_lam = defaultdict(list)
    for row in rows:
        if level_id is not None and "level_id" in row and int(row["level_id"]) != int(level_id):
            continue
        if not is_ok(row):
            continue
        v = _finite(row)
        if v is not None:
            by_lam[float(row["lambda"])].append(v)
    if not by_lam:
        raise EmptyTable(f"no usable rows for level {level_id}")
    best, best_val = None, math.inf
    for lam in sorted(by_lam):
        vals = np.asarray(by_lam[lam])
        if statistic == "median":
            val = float(np.median(vals))
        else:
            val = float(np.mean(np.log10(np.maximum(vals, np.finfo(float).tiny))))
        if val < best_val:
            best, best_val = lam, val
    return best


def min_median_error(rows, level_id=None) -> float:
    """Smallest median relative error over the lambda grid."""
    lam = best_lambda(rows, level_id)
    vals = [float(r["rel_error"]) for r in rows
            if is_ok(r) and float(r["lambda"]) == lam
            and (level_id is None or int(r.get("level_id", level_id)) == int(level_id))]
    return float(np.median(vals))
