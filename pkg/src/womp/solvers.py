"""Loss-function-based OMP driver and the restricted LAD fitter."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from womp.linalg import (
    DimensionMismatch,
    ZeroColumn,
    as_matrix,
    as_support,
    least_squares_restricted,
)
from womp.losses import Family, LossSpec, as_weights, fidelity, penalty
from womp.selection import SelectionContext, _weighted_median_columns, score_all, univariate_lad_argmin

NORMALIZATION_TOL = 1e-8
STALL_TOL = 1e-12


class NotNormalized(ValueError):
    pass


class ZeroTruth(ValueError):
    pass


class Status(enum.Enum):
    COMPLETED = "completed"
    STALLED = "stalled"
    DELTA_BELOW_TOL = "delta_below_tol"


@dataclass(frozen=True)
class SolverOptions:
    """Options for :func:`omp_run` and :func:`lad_restricted`.

    ``lad_max_sweeps`` caps the coordinate-descent warm-up of the LAD
    fitter; the vertex phase that follows is what certifies optimality, so
    a few sweeps suffice. ``None`` means ``200 * |S| + 200``.
    """

    max_iterations: int = 10
    restrict_to_complement: bool = False
    delta_tolerance: float = 0.0
    lad_sweep_tolerance: float = 1e-10
    lad_max_sweeps: int | None = 3
    check_invariants: bool = False

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")
        if self.delta_tolerance < 0:
            raise ValueError("delta_tolerance must be nonnegative")


# ---------------------------------------------------------------------------
# restricted LAD


class LadResult(NamedTuple):
    x: np.ndarray
    objective: float
    sweeps: int
    pivots: int
    converged: bool
    underdetermined: bool


def _zero_tol(y) -> float:
    return 1e-11 * (1.0 + float(np.max(np.abs(y), initial=0.0)))


def _coordinate_sweeps(B, y, z, tol, max_sweeps):
    r = y - B @ z
    f = float(np.sum(np.abs(r)))
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        for i in range(B.shape[1]):
            a = B[:, i]
            p = r + z[i] * a
            t, _ = univariate_lad_argmin(p, a)
            z[i] = t
            r = p - t * a
        f_new = float(np.sum(np.abs(r)))
        done = f - f_new < tol
        f = f_new
        if done:
            return z, sweeps, True
    return z, sweeps, False


def _line_search(B, r, D):
    """Best step along each column of `D` for ``||r - t B d||_1``."""
    BD = B @ D
    live = np.any(BD != 0.0, axis=0)
    t = np.zeros(D.shape[1])
    if np.any(live):
        t[live], _ = _weighted_median_columns(np.broadcast_to(r[:, None], BD[:, live].shape), BD[:, live])
    after = np.sum(np.abs(r[:, None] - BD * t), axis=0)
    return t, after


def _vertex_descent(B, y, z, tol, max_pivots):
    """Walk vertex to vertex along improving edges until none improves.

    At a vertex the edge directions keep all but one active (zero)
    residual at zero; the steepest descending edge is followed with an
    exact one-dimensional LAD step. Away from a vertex the iterate first
    moves inside the null space of the active rows.
    """
    k = B.shape[1]
    ztol = _zero_tol(y)
    pivots = 0
    while pivots < max_pivots:
        r = y - B @ z
        f = float(np.sum(np.abs(r)))
        active = np.abs(r) <= ztol
        zero = np.flatnonzero(active)
        basis = zero
        if zero.size:
            # independent subset of the zero-residual rows
            _, Rz, piv = scipy.linalg.qr(B[zero].T, mode="economic", pivoting=True)
            d = np.abs(np.diag(Rz))
            rank = int(np.sum(d > 1e-10 * d[0])) if d.size and d[0] > 0 else 0
            basis = zero[piv[:rank]]
        pivots += 1
        if basis.size < k:
            D = scipy.linalg.null_space(B[basis]) if basis.size else np.eye(k)
            t, after = _line_search(B, r, D)
            best = int(np.argmin(after))
            if after[best] > f + tol:
                return z, pivots, True
            z = z + t[best] * D[:, best]
            continue
        D = np.linalg.inv(B[basis])
        G = B @ D
        sgn = np.where(active, 0.0, np.sign(r))
        pull = sgn @ G
        slope = np.abs(G[active]).sum(axis=0) - np.abs(pull)
        b = int(np.argmin(slope))
        if slope[b] >= -1e-12 * (1.0 + np.abs(G[:, b]).sum()):
            return z, pivots, True
        d = D[:, b]
        t, after = _line_search(B, r, d[:, None])
        if f - after[0] <= tol:
            return z, pivots, True
        z = z + t[0] * d
    return z, pivots, False


def lad_restricted(A, y, S, opts: SolverOptions | None = None, x0=None, full_output: bool = False):
    """Minimize ``||y - A z||_1`` over vectors `z` supported on `S`.

    Cyclic coordinate descent (each coordinate update an exact weighted
    median) runs until a sweep improves the objective by less than
    ``lad_sweep_tolerance * (1 + ||y||_1)``. Coordinate descent can stop at
    a corner of the piecewise-linear objective that is not a minimizer, so
    its result is then refined by vertex-to-vertex descent along edge
    directions until no edge improves.

    When ``A_S`` has full row rank the fit interpolates; the least-squares
    minimum-norm interpolant is returned and flagged ``underdetermined``.
    """
    opts = opts or SolverOptions()
    A = as_matrix(A)
    y = np.asarray(y, dtype=float)
    m, n = A.shape
    if y.shape != (m,):
        raise DimensionMismatch(f"A {A.shape}, y {y.shape}")
    S = as_support(S, n)
    x = np.zeros(n)

    def pack(z, sweeps, pivots, converged, under):
        x[S] = z
        obj = float(np.sum(np.abs(y - A @ x)))
        if full_output:
            return LadResult(x, obj, sweeps, pivots, converged, under)
        return x

    if S.size == 0:
        return pack(np.zeros(0), 0, 0, True, False)
    B = A[:, S]
    zero = np.flatnonzero(~np.any(B != 0.0, axis=0))
    if zero.size:
        raise ZeroColumn(int(S[zero[0]]))

    if S.size >= m and np.linalg.matrix_rank(B) == m:
        z = np.linalg.lstsq(B, y, rcond=None)[0]
        return pack(z, 0, 0, True, True)

    tol = opts.lad_sweep_tolerance * (1.0 + float(np.sum(np.abs(y))))
    max_sweeps = opts.lad_max_sweeps if opts.lad_max_sweeps is not None else 200 * S.size + 200
    z = np.zeros(S.size) if x0 is None else np.asarray(x0, dtype=float)[S].copy()
    z, sweeps, cd_ok = _coordinate_sweeps(B, y, z, tol, max_sweeps)
    z, pivots, vd_ok = _vertex_descent(B, y, z, tol, max_pivots=50 * (S.size + m))
    return pack(z, sweeps, pivots, vd_ok, False)


# ---------------------------------------------------------------------------
# greedy driver


@dataclass(frozen=True)
class IterationRecord:
    k: int
    index: int
    support: tuple[int, ...]
    x: np.ndarray = field(repr=False)
    fidelity: float
    loss: float
    delta: float
    stalled: bool = False
    flags: tuple[str, ...] = ()


@dataclass
class GreedyTrace:
    """Per-iteration history of one :func:`omp_run` call.

    ``fidelity`` stores ``||r||_2^2`` for LASSO, ``||r||_2`` for SR-LASSO
    and ``||r||_1`` for LAD-LASSO specs.
    """

    spec: LossSpec
    n: int
    records: list[IterationRecord] = field(default_factory=list)
    status: Status = Status.COMPLETED
    initial_fidelity: float = 0.0

    def __len__(self) -> int:
        return len(self.records)

    @property
    def x(self) -> np.ndarray:
        return self.records[-1].x.copy() if self.records else np.zeros(self.n)

    @property
    def support(self) -> tuple[int, ...]:
        return self.records[-1].support if self.records else ()

    @property
    def indices(self) -> list[int]:
        return [rec.index for rec in self.records]

    def iterate(self, k: int) -> np.ndarray:
        """Iterate after ``k`` iterations, held fixed after a stall."""
        if k <= 0 or not self.records:
            return np.zeros(self.n)
        return self.records[min(k, len(self.records)) - 1].x.copy()


def _refit(spec: LossSpec, A, y, S, opts, x_prev):
    if spec.family is Family.LADLASSO:
        res = lad_restricted(A, y, S, opts, x0=x_prev, full_output=True)
        flags = []
        if not res.converged:
            flags.append("lad_not_converged")
        if res.underdetermined:
            flags.append("underdetermined")
        return res.x, tuple(flags)
    res = least_squares_restricted(A, y, S, full_output=True)
    return res.x, ("rank_deficient",) if res.rank_deficient else ()


def omp_run(spec: LossSpec, A, y, w, opts: SolverOptions | None = None) -> GreedyTrace:
    """Run loss-function-based OMP for the loss described by `spec`.

    Each iteration scores every index with the closed-form loss reduction,
    adds the maximizer (lowest index on ties) to the support and refits
    the data-fidelity term on that support: least squares for the LASSO
    and SR-LASSO families, least absolute deviations for LAD-LASSO.

    Iteration stops early when the selected index is already in the
    support and the refit leaves the iterate unchanged (``Status.STALLED``;
    further iterations would be identical) or when the best reduction is
    at most ``opts.delta_tolerance`` (if positive).
    """
    opts = opts or SolverOptions()
    A = as_matrix(A)
    m, n = A.shape
    y = np.asarray(y, dtype=float)
    if y.shape != (m,):
        raise DimensionMismatch(f"A {A.shape}, y {y.shape}")
    w = as_weights(w, n)
    if opts.restrict_to_complement and opts.max_iterations > n:
        raise ValueError("max_iterations exceeds N with restrict_to_complement")

    lad = spec.family is Family.LADLASSO
    if lad:
        zero = np.flatnonzero(~np.any(A != 0.0, axis=0))
        if zero.size:
            raise ZeroColumn(int(zero[0]))
    else:
        dev = np.max(np.abs(np.linalg.norm(A, axis=0) - 1.0))
        if dev > NORMALIZATION_TOL:
            raise NotNormalized(f"columns deviate from unit norm by {dev:.3g}")

    x = np.zeros(n)
    S = np.zeros(0, dtype=np.intp)
    trace = GreedyTrace(spec, n, initial_fidelity=fidelity(spec.family, y))
    check = ("lad" if lad else "ls") if opts.check_invariants else None

    for k in range(1, opts.max_iterations + 1):
        ctx = SelectionContext.build(A, y, w, spec.lam, x, S, check=check)
        scores = score_all(ctx, spec)
        if opts.restrict_to_complement:
            scores[S] = -np.inf
        j = int(np.argmax(scores))
        delta = float(scores[j])
        if opts.delta_tolerance > 0 and delta <= opts.delta_tolerance:
            trace.status = Status.DELTA_BELOW_TOL
            break
        was_in = bool(ctx.in_support[j])
        S = np.union1d(S, [j]).astype(np.intp)
        x_new, flags = _refit(spec, A, y, S, opts, x)
        stalled = was_in and np.max(np.abs(x_new - x), initial=0.0) <= STALL_TOL * (1.0 + np.max(np.abs(x)))
        r = y - A @ x_new
        fid = fidelity(spec.family, r)
        trace.records.append(IterationRecord(
            k=k,
            index=j,
            support=tuple(int(i) for i in S),
            x=x_new,
            fidelity=fid,
            loss=fid + spec.lam * penalty(spec.regularizer, x_new, w),
            delta=delta,
            stalled=bool(stalled),
            flags=flags,
        ))
        x = x_new
        if stalled:
            trace.status = Status.STALLED
            break
    return trace


def relative_l2_error(x_hat, x_true) -> float:
    x_hat = np.asarray(x_hat, dtype=float)
    x_true = np.asarray(x_true, dtype=float)
    if x_hat.shape != x_true.shape:
        raise DimensionMismatch(f"{x_hat.shape} vs {x_true.shape}")
    nrm = np.linalg.norm(x_true)
    if nrm == 0:
        raise ZeroTruth("relative error undefined for a zero reference")
    return float(np.linalg.norm(x_hat - x_true) / nrm)
