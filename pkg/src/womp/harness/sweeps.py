"""Tuning-parameter and iteration sweeps."""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from womp.harness.config import Level, Setting, SweepConfig
from womp.linalg import normalize_columns
from womp.problems import (
    MonteCarloError,
    ProblemInstance,
    gen_function_approx,
    gen_gaussian_sparse,
    gen_oracle_weights,
    hyperbolic_cross,
    iso_exponential,
)
from womp.solvers import SolverOptions, omp_run, relative_l2_error

LAMBDA_COLUMNS = ["level_id", "level_desc", "lambda", "trial", "rel_error", "status"]
ITER_COLUMNS = ["lambda", "trial", "k", "rel_error", "fidelity", "loss", "selected_index", "support_size", "status"]


def derive_seed(base_seed: int, level_index: int, trial_index: int, stream: int = 0) -> np.random.SeedSequence:
    """Independent stream per (level, trial); unaffected by ``n_trials``."""
    return np.random.SeedSequence([int(base_seed), int(level_index), int(trial_index), int(stream)])


def worker_count() -> int:
    env = os.environ.get("WOMP_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


class Trial:
    """One generated instance plus the machinery to score an estimate."""

    def __init__(self, cfg: SweepConfig, level: Level, trial: int):
        self.cfg = cfg
        self.level = level
        self.trial = trial
        seed = derive_seed(cfg.base_seed, level.index, trial)
        self.mc = None
        if cfg.setting is Setting.FUNCTION_APPROX:
            Lambda = hyperbolic_cross(cfg.d, cfg.hc_order)
            inst = gen_function_approx(iso_exponential, Lambda, cfg.m, level.eta, cfg.M, level.K_corrupt, seed)
            self.mc = MonteCarloError(iso_exponential, Lambda, cfg.mc_points, derive_seed(cfg.base_seed, level.index, trial, 2))
        else:
            inst = gen_gaussian_sparse(cfg.N, cfg.m, cfg.s, level.eta, cfg.M, level.K_corrupt, seed)
            if cfg.setting is Setting.GAUSSIAN_ORACLE:
                support = np.flatnonzero(inst.x_true)
                inst.w = gen_oracle_weights(support, cfg.oracle_fraction, level.w0, cfg.N,
                                            derive_seed(cfg.base_seed, level.index, trial, 1))
                inst.meta["setting"] = "oracle"
                inst.meta["w0"] = level.w0
        self.instance = inst
        if inst.meta.get("normalized"):
            self.A, self.scales = inst.A, np.ones(inst.A.shape[1])
        else:
            self.A, self.scales = normalize_columns(inst.A)

    def error(self, x_normalized) -> float:
        """Relative error of an estimate expressed in normalized-column units."""
        x = np.asarray(x_normalized) / self.scales
        if self.mc is not None:
            return self.mc(x)
        return relative_l2_error(x, self.instance.x_true)

    def run(self, lam: float, K: int):
        spec = self.cfg.spec.with_lambda(lam)
        return omp_run(spec, self.A, self.instance.y, self.instance.w, SolverOptions(max_iterations=K))


def make_instance(cfg: SweepConfig, level_index: int = 0, trial: int = 0) -> ProblemInstance:
    return Trial(cfg, cfg.levels[level_index], trial).instance


def _status(flags) -> str:
    return "ok" if not flags else "ok:" + "+".join(sorted(set(flags)))


def _error_status(exc: Exception) -> str:
    return f"error:{type(exc).__name__}"


def _lambda_cell(args) -> list[dict]:
    cfg, level, trial = args
    rows = []
    grid = cfg.lambda_grid
    try:
        tr = Trial(cfg, level, trial)
    except Exception as exc:  # a failed cell never aborts the sweep
        return [dict(level_id=level.index, level_desc=level.desc, **{"lambda": float(lam)}, trial=trial,
                     rel_error=math.nan, status=_error_status(exc)) for lam in grid]
    for lam in grid:
        row = dict(level_id=level.index, level_desc=level.desc, **{"lambda": float(lam)}, trial=trial)
        try:
            trace = tr.run(float(lam), cfg.K)
            flags = [f for rec in trace.records for f in rec.flags]
            row.update(rel_error=tr.error(trace.x), status=_status(flags))
        except Exception as exc:
            row.update(rel_error=math.nan, status=_error_status(exc))
        rows.append(row)
    return rows


def _iter_cell(args) -> list[dict]:
    cfg, level, trial, lambdas = args
    rows = []
    try:
        tr = Trial(cfg, level, trial)
    except Exception as exc:
        return [dict(**{"lambda": float(lam)}, trial=trial, k=k, rel_error=math.nan, fidelity=math.nan,
                     loss=math.nan, selected_index=0, support_size=0, status=_error_status(exc))
                for lam in lambdas for k in range(1, cfg.K + 1)]
    for lam in lambdas:
        try:
            trace = tr.run(float(lam), cfg.K)
        except Exception as exc:
            rows.extend(dict(**{"lambda": float(lam)}, trial=trial, k=k, rel_error=math.nan, fidelity=math.nan,
                             loss=math.nan, selected_index=0, support_size=0, status=_error_status(exc))
                        for k in range(1, cfg.K + 1))
            continue
        n_rec = len(trace.records)
        for k in range(1, cfg.K + 1):
            if n_rec == 0:
                rows.append(dict(**{"lambda": float(lam)}, trial=trial, k=k, rel_error=tr.error(np.zeros(tr.A.shape[1])),
                                 fidelity=trace.initial_fidelity, loss=trace.initial_fidelity,
                                 selected_index=0, support_size=0, status="ok:no_iteration"))
                continue
            rec = trace.records[min(k, n_rec) - 1]
            status = _status(rec.flags)
            if k > n_rec:
                status = "ok:" + trace.status.value if not rec.flags else status + "+" + trace.status.value
            elif rec.stalled:
                status = _status(rec.flags + ("stalled",))
            rows.append(dict(**{"lambda": float(lam)}, trial=trial, k=k, rel_error=tr.error(rec.x),
                             fidelity=rec.fidelity, loss=rec.loss, selected_index=rec.index + 1,
                             support_size=len(rec.support), status=status))
    return rows


def _run_cells(fn, cells, workers: int | None = None) -> list[dict]:
    workers = worker_count() if workers is None else workers
    workers = max(1, min(workers, len(cells)))
    if workers == 1:
        chunks = [fn(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(fn, cells))
    return [row for chunk in chunks for row in chunk]


def sweep_lambda(cfg: SweepConfig, workers: int | None = None) -> list[dict]:
    """Relative error for every (level, lambda, trial) at ``cfg.K`` iterations.

    Each lambda gets a fresh run on the same instance. Rows come back in
    canonical (level, lambda, trial) order regardless of scheduling.
    """
    cells = [(cfg, level, t) for level in cfg.levels for t in range(cfg.n_trials)]
    rows = _run_cells(_lambda_cell, cells, workers)
    rows.sort(key=lambda r: (r["level_id"], r["lambda"], r["trial"]))
    return rows


def iteration_lambdas(cfg: SweepConfig) -> list[float]:
    return sorted({0.0, *(float(v) for v in cfg.lambda_grid)})


def sweep_iterations(cfg: SweepConfig, lambdas=None, workers: int | None = None) -> list[dict]:
    """Per-iteration errors of one run per (lambda, trial).

    The lambda set defaults to 0 followed by the configured grid and must
    contain 0. Only a single noise/corruption/weight level is allowed.
    """
    levels = cfg.levels
    if len(levels) != 1:
        raise ValueError("sweep-iter takes exactly one level (single eta, corruption fraction and w0)")
    lambdas = iteration_lambdas(cfg) if lambdas is None else sorted({float(v) for v in lambdas})
    if 0.0 not in lambdas:
        raise ValueError("the lambda set of an iteration sweep must include 0")
    cells = [(cfg, levels[0], t, lambdas) for t in range(cfg.n_trials)]
    rows = _run_cells(_iter_cell, cells, workers)
    rows.sort(key=lambda r: (r["lambda"], r["trial"], r["k"]))
    return rows


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(rows, columns, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
    tmp.replace(path)


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
