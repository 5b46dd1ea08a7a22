"""Closed-form greedy loss reductions.

For a loss ``G`` and an iterate ``x`` that is fidelity-optimal on its
support ``S``, every rule here returns

    Delta(x, S, j) = G(x) - min_t G(x + t e_j)

for one coordinate ``j``. The scalar ``delta_*`` functions follow the
formulas term by term; :func:`score_all` evaluates the same quantities for
every column at once and is what the solver calls.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from womp.linalg import DimensionMismatch, ZeroColumn, as_matrix, as_support
from womp.losses import Family, LossSpec, Regularizer, as_weights

ORTHO_RTOL = 1e-9
NORM_TOL = 1e-10


def univariate_lad_argmin(y, a) -> tuple[float, int]:
    """Minimize ``t -> ||y - t a||_1`` by a weighted median.

    The ratios ``y_i / a_i`` over the nonzero entries of `a` are sorted
    (stably, so ties keep ascending index order) and the first ratio at
    which the accumulated ``|a_i|`` reaches half of ``||a||_1`` is returned.

    Returns
    -------
    t_star : float
        A minimizer.
    i_hat : int
        0-based index with ``t_star == y[i_hat] / a[i_hat]``.
    """
    y = np.asarray(y, dtype=float)
    a = np.asarray(a, dtype=float)
    if y.shape != a.shape or y.ndim != 1:
        raise DimensionMismatch(f"y {y.shape} vs a {a.shape}")
    nz = np.flatnonzero(a)
    if nz.size == 0:
        raise ValueError("univariate LAD needs a nonzero direction")
    ratios = y[nz] / a[nz]
    order = np.argsort(ratios, kind="stable")
    weights = np.abs(a[nz[order]])
    k_hat = int(np.argmax(2.0 * np.cumsum(weights) >= weights.sum()))
    i_hat = int(nz[order[k_hat]])
    return float(y[i_hat] / a[i_hat]), i_hat


def _weighted_median_columns(R, W):
    """Column-wise version of :func:`univariate_lad_argmin`.

    ``R`` holds the targets and ``W`` the directions, one problem per
    column. Columns of `W` must be nonzero.
    """
    nz = W != 0.0
    ratios = np.divide(R, W, out=np.full(R.shape, np.inf), where=nz)
    order = np.argsort(ratios, axis=0, kind="stable")
    weights = np.take_along_axis(np.abs(W), order, axis=0)
    csum = np.cumsum(weights, axis=0)
    k_hat = np.argmax(2.0 * csum >= csum[-1], axis=0)
    i_hat = order[k_hat, np.arange(R.shape[1])]
    return np.take_along_axis(ratios, i_hat[None, :], axis=0)[0], i_hat


@dataclass(frozen=True)
class SelectionContext:
    """Everything a selection rule needs about the current iterate.

    Build instances with :meth:`build`, which caches the residual
    ``r = y - A x``, its norms and the correlations ``A^T r``.
    """

    A: np.ndarray
    y: np.ndarray
    w: np.ndarray
    lam: float
    x: np.ndarray
    S: np.ndarray
    r: np.ndarray
    r_norm2: float
    r_norm1: float
    correlations: np.ndarray
    in_support: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, A, y, w, lam, x=None, S=(), check: str | None = None) -> "SelectionContext":
        """Assemble a context.

        Parameters
        ----------
        check : {None, "ls", "lad"}
            ``"ls"`` verifies unit columns and residual orthogonality on
            the support; ``"lad"`` verifies nonzero columns.
        """
        A = as_matrix(A)
        m, n = A.shape
        y = np.asarray(y, dtype=float)
        if y.shape != (m,):
            raise DimensionMismatch(f"A {A.shape}, y {y.shape}")
        w = as_weights(w, n)
        if not lam >= 0:
            raise ValueError("lambda must be nonnegative")
        x = np.zeros(n) if x is None else np.asarray(x, dtype=float)
        if x.shape != (n,):
            raise DimensionMismatch(f"x {x.shape}, expected ({n},)")
        S = as_support(S, n)
        mask = np.zeros(n, dtype=bool)
        mask[S] = True
        if np.any(x[~mask] != 0.0):
            raise ValueError("iterate has nonzeros outside the support")
        r = y - A @ x
        ctx = cls(A, y, w, float(lam), x, S, r, float(np.linalg.norm(r)),
                  float(np.sum(np.abs(r))), A.T @ r, mask)
        if check == "ls":
            ctx.check_least_squares()
        elif check == "lad":
            ctx.check_nonzero_columns()
        return ctx

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def check_least_squares(self):
        norms = np.linalg.norm(self.A, axis=0)
        if np.any(np.abs(norms - 1.0) > NORM_TOL):
            raise ValueError("columns are not l2-normalized")
        c = np.abs(self.correlations[self.S])
        bound = ORTHO_RTOL * max(float(np.linalg.norm(self.y)), 1.0)
        if c.size and c.max() > bound:
            raise ValueError(f"residual not orthogonal to the support (max |<a_j, r>| = {c.max():.3g})")

    def check_nonzero_columns(self):
        zero = np.flatnonzero(~np.any(self.A != 0.0, axis=0))
        if zero.size:
            raise ZeroColumn(int(zero[0]))

    def augmented_column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Column ``j`` of ``[A; lam w^T]`` and the matching augmented residual."""
        lw = self.lam * self.w[j]
        a_tilde = np.append(self.A[:, j], lw)
        r_tilde = np.append(self.r, -lw * self.x[j])
        return a_tilde, r_tilde


def _index(ctx: SelectionContext, j) -> int:
    j = int(j)
    if not 0 <= j < ctx.n:
        raise IndexError(f"index {j} out of range [0, {ctx.n})")
    return j


def _clamp(v: float) -> float:
    return max(float(v), 0.0)


def delta_lasso_l1(ctx: SelectionContext, j: int) -> float:
    j = _index(ctx, j)
    lw = ctx.lam * ctx.w[j]
    if not ctx.in_support[j]:
        return max(abs(ctx.correlations[j]) - lw / 2, 0.0) ** 2
    xa = abs(ctx.x[j])
    return _clamp(max(xa * (lw - xa), lw * (xa - lw / 4 - abs(xa - lw / 2)), 0.0))


def delta_srlasso_l1(ctx: SelectionContext, j: int) -> float:
    j = _index(ctx, j)
    lw = ctx.lam * ctx.w[j]
    rn = ctx.r_norm2
    if not ctx.in_support[j]:
        c = abs(ctx.correlations[j])
        if lw >= 1.0 or c <= lw * rn:
            # stationary point of the 1-D objective falls at t <= 0: t = 0 is optimal
            return 0.0
        rad = max((1.0 - lw**2) * (rn**2 - c**2), 0.0)
        return _clamp(rn - lw * c - np.sqrt(rad))
    xa = abs(ctx.x[j])
    if lw >= 1.0:
        rho = xa
    else:
        rho = min(xa, lw * rn / np.sqrt(1.0 - lw**2))
    return _clamp(rn - np.hypot(rho, rn) + lw * (xa - abs(xa - rho)))


def delta_ladlasso_l1(ctx: SelectionContext, j: int) -> float:
    j = _index(ctx, j)
    if not np.any(ctx.A[:, j]):
        raise ZeroColumn(j)
    a_tilde, r_tilde = ctx.augmented_column(j)
    t, _ = univariate_lad_argmin(r_tilde, a_tilde)
    lw = ctx.lam * ctx.w[j]
    return _clamp(lw * abs(ctx.x[j]) + ctx.r_norm1 - np.sum(np.abs(r_tilde - t * a_tilde)))


def delta_lasso_l0(ctx: SelectionContext, j: int) -> float:
    j = _index(ctx, j)
    pen = ctx.lam * ctx.w[j] ** 2
    if not ctx.in_support[j]:
        return _clamp(ctx.correlations[j] ** 2 - pen)
    if ctx.x[j] != 0.0:
        return _clamp(pen - ctx.x[j] ** 2)
    return 0.0


def delta_srlasso_l0(ctx: SelectionContext, j: int) -> float:
    j = _index(ctx, j)
    pen = ctx.lam * ctx.w[j] ** 2
    rn = ctx.r_norm2
    if not ctx.in_support[j]:
        rad = max(rn**2 - ctx.correlations[j] ** 2, 0.0)
        return _clamp(rn - np.sqrt(rad) - pen)
    if ctx.x[j] != 0.0:
        return _clamp(rn + pen - np.hypot(rn, ctx.x[j]))
    return 0.0


def delta_ladlasso_l0(ctx: SelectionContext, j: int) -> float:
    j = _index(ctx, j)
    a = ctx.A[:, j]
    if not np.any(a):
        raise ZeroColumn(j)
    pen = ctx.lam * ctx.w[j] ** 2
    t, _ = univariate_lad_argmin(ctx.r, a)
    gain = ctx.r_norm1 - np.sum(np.abs(ctx.r - t * a))
    if ctx.in_support[j] and ctx.x[j] != 0.0:
        drop = ctx.r_norm1 - np.sum(np.abs(ctx.r + ctx.x[j] * a)) + pen
        return _clamp(max(gain, drop))
    return _clamp(gain - pen)


RULES: dict[str, Callable[[SelectionContext, int], float]] = {
    "lasso-l1": delta_lasso_l1,
    "srlasso-l1": delta_srlasso_l1,
    "ladlasso-l1": delta_ladlasso_l1,
    "lasso-l0": delta_lasso_l0,
    "srlasso-l0": delta_srlasso_l0,
    "ladlasso-l0": delta_ladlasso_l0,
}


def rule_name(rule) -> str:
    name = rule.rule if isinstance(rule, LossSpec) else str(rule).lower()
    if name not in RULES:
        raise ValueError(f"unknown rule {rule!r}; expected one of {sorted(RULES)}")
    return name


def score_all(ctx: SelectionContext, rule) -> np.ndarray:
    """Loss reduction for every index ``j``, vectorized over columns.

    `rule` is a rule name such as ``"lasso-l1"`` or a :class:`LossSpec`
    (its ``lam`` is ignored in favour of ``ctx.lam``).
    """
    spec = LossSpec.from_rule(rule_name(rule))
    fam, reg = spec.family, spec.regularizer
    lw = ctx.lam * ctx.w
    pen0 = ctx.lam * ctx.w**2
    inS = ctx.in_support
    xa = np.abs(ctx.x)
    c = np.abs(ctx.correlations)
    rn = ctx.r_norm2
    out = np.zeros(ctx.n)

    with np.errstate(divide="ignore", invalid="ignore"):
        if fam is Family.LASSO and reg is Regularizer.L1W:
            out = np.where(
                inS,
                np.maximum.reduce([xa * (lw - xa), lw * (xa - lw / 4 - np.abs(xa - lw / 2)), np.zeros(ctx.n)]),
                np.maximum(c - lw / 2, 0.0) ** 2,
            )
        elif fam is Family.LASSO:
            out = np.where(inS, np.where(ctx.x != 0.0, pen0 - xa**2, 0.0), c**2 - pen0)
        elif fam is Family.SRLASSO and reg is Regularizer.L1W:
            small = lw < 1.0
            one_minus = np.where(small, 1.0 - lw**2, 1.0)
            out_off = np.where(
                small & (c > lw * rn),
                rn - lw * c - np.sqrt(np.maximum(one_minus * (rn**2 - c**2), 0.0)),
                0.0,
            )
            rho = np.where(small, np.minimum(xa, lw * rn / np.sqrt(one_minus)), xa)
            out_on = rn - np.hypot(rho, rn) + lw * (xa - np.abs(xa - rho))
            out = np.where(inS, out_on, out_off)
        elif fam is Family.SRLASSO:
            out_off = rn - np.sqrt(np.maximum(rn**2 - c**2, 0.0)) - pen0
            out_on = np.where(ctx.x != 0.0, rn + pen0 - np.hypot(rn, ctx.x), 0.0)
            out = np.where(inS, out_on, out_off)
        elif reg is Regularizer.L1W:
            ctx.check_nonzero_columns()
            W = np.vstack([ctx.A, lw[None, :]])
            R = np.vstack([np.broadcast_to(ctx.r[:, None], ctx.A.shape), (-lw * ctx.x)[None, :]])
            t, _ = _weighted_median_columns(R, W)
            after = np.sum(np.abs(R - t * W), axis=0)
            out = lw * xa + ctx.r_norm1 - after
        else:
            ctx.check_nonzero_columns()
            R = np.broadcast_to(ctx.r[:, None], ctx.A.shape)
            t, _ = _weighted_median_columns(R, ctx.A)
            gain = ctx.r_norm1 - np.sum(np.abs(R - t * ctx.A), axis=0)
            drop = ctx.r_norm1 - np.sum(np.abs(R + ctx.x * ctx.A), axis=0) + pen0
            on_nz = inS & (ctx.x != 0.0)
            out = np.where(on_nz, np.maximum(gain, drop), gain - pen0)

    return np.maximum(out, 0.0)
