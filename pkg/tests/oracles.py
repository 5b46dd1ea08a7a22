"""Independent reference computations used by the test-suite.

Nothing here calls into the package's selection rules or fitters.
"""

import itertools

import numpy as np


def loss_value(rule, A, y, w, lam, z):
    fam, reg = rule.split("-")
    r = y - A @ z
    if fam == "lasso":
        fid = r @ r
    elif fam == "srlasso":
        fid = np.sqrt(r @ r)
    else:
        fid = np.abs(r).sum()
    if reg == "l1":
        pen = np.sum(w * np.abs(z))
    else:
        pen = np.sum(w[z != 0] ** 2)
    return fid + lam * pen


def _line_values(rule, A, y, w, lam, x, j, ts):
    """Loss along ``x + t e_j`` for every t in `ts` (vectorized)."""
    fam, reg = rule.split("-")
    base_r = y - A @ x
    R = base_r[:, None] - np.outer(A[:, j], ts)
    if fam == "lasso":
        fid = np.sum(R * R, axis=0)
    elif fam == "srlasso":
        fid = np.sqrt(np.sum(R * R, axis=0))
    else:
        fid = np.sum(np.abs(R), axis=0)
    xj = x[j] + ts
    rest = np.delete(np.arange(x.size), j)
    if reg == "l1":
        pen = np.sum(w[rest] * np.abs(x[rest])) + w[j] * np.abs(xj)
    else:
        pen = np.sum(w[rest][x[rest] != 0] ** 2) + w[j] ** 2 * (xj != 0)
    return fid + lam * pen


def grid_reduction(rule, A, y, w, lam, x, j, n_grid=20001, passes=2):
    """``G(x) - min_t G(x + t e_j)`` by dense search along the line.

    The grid covers every kink of the one-dimensional objective, is refined
    twice around the incumbent, and the special points ``t = 0``,
    ``t = -x_j`` and all residual breakpoints are evaluated exactly.
    """
    r = y - A @ x
    a = A[:, j]
    nz = a != 0
    breaks = r[nz] / a[nz]
    special = np.concatenate([[0.0, -x[j]], breaks])
    span = 2.0 * (np.linalg.norm(r) / max(np.linalg.norm(a), 1e-300) + abs(x[j]) + np.max(np.abs(special))) + 1.0
    ts = np.concatenate([np.linspace(-span, span, n_grid), special])
    vals = _line_values(rule, A, y, w, lam, x, j, ts)
    best_t = ts[np.argmin(vals)]
    best = vals.min()
    step = 2 * span / (n_grid - 1)
    for _ in range(passes):
        ts = np.linspace(best_t - 2 * step, best_t + 2 * step, 2001)
        vals = _line_values(rule, A, y, w, lam, x, j, ts)
        if vals.min() < best:
            best = vals.min()
            best_t = ts[np.argmin(vals)]
        step = 4 * step / 2000
    g0 = loss_value(rule, A, y, w, lam, x)
    return g0 - best


def lad_vertex_objective(A, y):
    """Smallest ``||y - A z||_1`` over all vertices (k residuals forced to zero)."""
    m, k = A.shape
    best = np.inf
    for rows in itertools.combinations(range(m), k):
        rows = list(rows)
        M = A[rows]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        z = np.linalg.solve(M, y[rows])
        best = min(best, np.abs(y - A @ z).sum())
    return best


def lad_vertex_solution(A, y):
    m, k = A.shape
    best, arg = np.inf, None
    for rows in itertools.combinations(range(m), k):
        rows = list(rows)
        M = A[rows]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        z = np.linalg.solve(M, y[rows])
        val = np.abs(y - A @ z).sum()
        if val < best:
            best, arg = val, z
    return arg


def plain_omp(A, y, k):
    """Textbook OMP: largest |correlation| off the support, then least squares."""
    n = A.shape[1]
    S = []
    x = np.zeros(n)
    r = y.copy()
    for _ in range(k):
        c = np.abs(A.T @ r)
        c[S] = -1.0
        S.append(int(np.argmax(c)))
        coef = np.linalg.lstsq(A[:, S], y, rcond=None)[0]
        x = np.zeros(n)
        x[S] = coef
        r = y - A @ x
    return S, x


def random_context(rng, rule, m=8, n=12, lam=0.5, support_size=None):
    """Random problem with an iterate that is fidelity-optimal on its support."""
    A = rng.standard_normal((m, n))
    A /= np.linalg.norm(A, axis=0)
    y = rng.standard_normal(m)
    w = rng.uniform(0.5, 2.0, n)
    k = rng.integers(0, 4) if support_size is None else support_size
    S = np.sort(rng.choice(n, k, replace=False))
    x = np.zeros(n)
    if k:
        if rule.startswith("ladlasso"):
            x[S] = lad_vertex_solution(A[:, S], y)
        else:
            x[S] = np.linalg.lstsq(A[:, S], y, rcond=None)[0]
    return A, y, w, lam, x, S
