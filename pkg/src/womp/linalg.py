"""Dense kernels shared by the selection rules and the local fitters.

Supports are 0-based integer arrays internally. The residual convention is
``r = y - A x`` throughout the package.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

RANK_RTOL = 1e-10


class DimensionMismatch(ValueError):
    pass


class ZeroColumn(ValueError):
    def __init__(self, j: int):
        super().__init__(f"column {j} of the matrix is zero")
        self.j = j


class RankDeficient(RuntimeWarning):
    """Flag carried by :class:`LstsqResult` when ``A_S`` loses rank."""


class LstsqResult(NamedTuple):
    x: np.ndarray
    rank: int
    rank_deficient: bool


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise DimensionMismatch(f"expected a nonempty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def as_support(S, n: int) -> np.ndarray:
    """Return ``S`` as a sorted, duplicate-free int array of 0-based indices."""
    S = np.unique(np.asarray(S, dtype=np.intp).ravel())
    if S.size and (S[0] < 0 or S[-1] >= n):
        raise IndexError(f"support index out of range [0, {n})")
    return S


def normalize_columns(A) -> tuple[np.ndarray, np.ndarray]:
    """Scale every column of `A` to unit Euclidean norm.

    Returns
    -------
    A_unit : ndarray
        The normalized matrix.
    scales : ndarray
        Original column norms, so that ``A_unit * scales == A``.
    """
    A = as_matrix(A)
    scales = np.linalg.norm(A, axis=0)
    zero = np.flatnonzero(scales == 0.0)
    if zero.size:
        raise ZeroColumn(int(zero[0]))
    return A / scales, scales


def residual(A, x, y) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if A.ndim != 2 or x.shape != (A.shape[1],) or y.shape != (A.shape[0],):
        raise DimensionMismatch(f"A {A.shape}, x {x.shape}, y {y.shape}")
    return y - A @ x


def least_squares_restricted(A, y, S, full_output: bool = False):
    """Least-squares fit of `y` using only the columns of `A` indexed by `S`.

    The column submatrix is factored with a column-pivoted QR. When its
    numerical rank (relative tolerance 1e-10 on the diagonal of R) falls
    below ``len(S)`` the minimum-norm solution is returned instead and the
    result is flagged rather than raising.

    Parameters
    ----------
    A : (m, N) array_like
    y : (m,) array_like
    S : sequence of int
        0-based column indices.
    full_output : bool
        Return an :class:`LstsqResult` instead of the bare vector.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    m, n = A.shape
    if y.shape != (m,):
        raise DimensionMismatch(f"A {A.shape}, y {y.shape}")
    S = as_support(S, n)
    x = np.zeros(n)
    if S.size == 0:
        return LstsqResult(x, 0, False) if full_output else x

    AS = A[:, S]
    Q, R, piv = scipy.linalg.qr(AS, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > RANK_RTOL * diag[0])) if diag.size and diag[0] > 0 else 0
    deficient = rank < S.size
    if deficient:
        coef = np.linalg.lstsq(AS, y, rcond=None)[0]
    else:
        coef = np.empty(S.size)
        coef[piv] = scipy.linalg.solve_triangular(R, Q.T @ y)
    x[S] = coef
    return LstsqResult(x, rank, deficient) if full_output else x
