"""Tensor Legendre bases on [-1, 1]^d and hyperbolic cross index sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

DOMAIN_TOL = 1e-12


class OutOfDomain(ValueError):
    pass


@dataclass(frozen=True)
class MultiIndexSet:
    """Ordered multi-indices; row ``j`` of :attr:`array` is ``nu_j``."""

    d: int
    indices: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("duplicate multi-indices")
        if any(len(nu) != self.d for nu in self.indices):
            raise ValueError(f"every multi-index must have length {self.d}")

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __getitem__(self, j):
        return self.indices[j]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.indices, dtype=np.intp).reshape(len(self), self.d)

    def position(self, nu: Sequence[int]) -> int:
        return self.indices.index(tuple(nu))


def _graded_lex_key(nu):
    return (sum(nu), tuple(-v for v in nu))


def hyperbolic_cross(d: int, n: int) -> MultiIndexSet:
    """All ``nu`` in N_0^d with ``prod(nu_k + 1) <= n + 1``.

    Enumerated depth-first; a branch is cut as soon as the running product
    exceeds the bound. Indices are returned in graded lexicographic order
    (total degree, then larger leading entries first).
    """
    if d < 1 or n < 0:
        raise ValueError("need d >= 1 and n >= 0")
    bound = n + 1
    out = []

    def descend(prefix, prod):
        k = len(prefix)
        if k == d:
            out.append(tuple(prefix))
            return
        v = 0
        while prod * (v + 1) <= bound:
            descend(prefix + [v], prod * (v + 1))
            v += 1

    descend([], 1)
    out.sort(key=_graded_lex_key)
    return MultiIndexSet(d, tuple(out))


def _check_cube(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + DOMAIN_TOL):
        raise OutOfDomain("points must lie in [-1, 1]^d")
    return np.clip(t, -1.0, 1.0)


def legendre_table(t, degree: int) -> np.ndarray:
    """Orthonormal Legendre values ``psi_0..psi_degree`` at `t`.

    ``psi_n = sqrt(2n + 1) P_n`` is orthonormal for the uniform probability
    measure on [-1, 1]. The result has shape ``t.shape + (degree + 1,)``.
    """
    t = _check_cube(t)
    P = np.empty(t.shape + (degree + 1,))
    P[..., 0] = 1.0
    if degree >= 1:
        P[..., 1] = t
    for n in range(1, degree):
        P[..., n + 1] = ((2 * n + 1) * t * P[..., n] - n * P[..., n - 1]) / (n + 1)
    return P * np.sqrt(2 * np.arange(degree + 1) + 1)


def legendre_eval(nu: Sequence[int], t) -> float:
    """Tensor orthonormal Legendre polynomial ``Psi_nu`` at one point `t`."""
    nu = np.asarray(nu, dtype=np.intp).ravel()
    t = np.asarray(t, dtype=float).ravel()
    if nu.size != t.size:
        raise ValueError(f"multi-index of length {nu.size} vs point of length {t.size}")
    tab = legendre_table(t, int(nu.max(initial=0)))
    return float(np.prod(tab[np.arange(nu.size), nu]))


def basis_matrix(Lambda: MultiIndexSet, points, chunk: int = 2048) -> np.ndarray:
    """``Psi_{nu_j}(t_i)`` for points of shape (Q, d); returns (Q, N)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != Lambda.d:
        raise ValueError(f"points have dimension {points.shape[1]}, index set {Lambda.d}")
    nus = Lambda.array
    deg = int(nus.max(initial=0))
    out = np.empty((points.shape[0], len(Lambda)))
    dims = np.arange(Lambda.d)
    for start in range(0, points.shape[0], chunk):
        tab = legendre_table(points[start:start + chunk], deg)  # (q, d, deg+1)
        vals = tab[:, dims[None, :], nus]  # (q, N, d)
        out[start:start + chunk] = np.prod(vals, axis=2)
    return out


def intrinsic_weights(Lambda: MultiIndexSet) -> np.ndarray:
    """Sup-norms of the basis functions: ``prod_k sqrt(2 nu_k + 1)``."""
    if len(Lambda) == 0:
        raise ValueError("empty index set")
    return np.prod(np.sqrt(2.0 * Lambda.array + 1.0), axis=1)


def iso_exponential(t, d: int | None = None):
    """``exp(-sum(t) / (2d))`` evaluated along the last axis of `t`."""
    t = _check_cube(t)
    t = np.atleast_1d(t)
    d = t.shape[-1] if d is None else d
    if t.shape[-1] != d:
        raise ValueError(f"points have dimension {t.shape[-1]}, expected {d}")
    val = np.exp(-np.sum(t, axis=-1) / (2.0 * d))
    return float(val) if val.ndim == 0 else val


def l2_error_estimate_mc(f: Callable, Lambda: MultiIndexSet, x_hat, Q: int = 10_000, seed=None) -> float:
    """Monte Carlo relative L^2 error of the expansion `x_hat` against `f`.

    Uses `Q` fresh points drawn uniformly from [-1, 1]^d.
    """
    return MonteCarloError(f, Lambda, Q, seed)(x_hat)


class ZeroFunction(ValueError):
    pass


class MonteCarloError:
    """Reusable Monte Carlo error estimator (basis evaluated once)."""

    def __init__(self, f: Callable, Lambda: MultiIndexSet, Q: int = 10_000, seed=None):
        if Q < 1:
            raise ValueError("Q must be positive")
        rng = np.random.default_rng(seed)
        pts = rng.uniform(-1.0, 1.0, size=(Q, Lambda.d))
        self.fvals = np.asarray(f(pts), dtype=float)
        self.norm2 = float(self.fvals @ self.fvals)
        if self.norm2 == 0:
            raise ZeroFunction("target vanishes on every sample point")
        self.Psi = basis_matrix(Lambda, pts)

    def __call__(self, x_hat) -> float:
        diff = self.fvals - self.Psi @ np.asarray(x_hat, dtype=float)
        return float(np.sqrt(diff @ diff / self.norm2))
