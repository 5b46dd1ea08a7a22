"""Random problem generators for the three experimental settings."""

from __future__ import annotations

from typing import Callable

import numpy as np

from womp.linalg import normalize_columns
from womp.problems.instance import ProblemInstance
from womp.problems.polynomials import MultiIndexSet, basis_matrix, intrinsic_weights


class EmptySupport(ValueError):
    pass


def _seed_meta(seed):
    if isinstance(seed, np.random.SeedSequence):
        return {"entropy": str(seed.entropy), "spawn_key": list(seed.spawn_key)}
    return seed


def bounded_noise(rng, m: int, eta: float) -> np.ndarray:
    """Gaussian vector rescaled to Euclidean norm exactly `eta`."""
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    if eta == 0:
        return np.zeros(m)
    e = rng.standard_normal(m)
    return e * (eta / np.linalg.norm(e))


def sparse_corruption(rng, m: int, M: float, K: int) -> np.ndarray:
    """`K` distinct positions filled with N(0, M^2) samples."""
    if not 0 <= K <= m:
        raise ValueError(f"need 0 <= K_corrupt <= m, got {K}")
    e = np.zeros(m)
    if M == 0 or K == 0:
        return e
    pos = rng.choice(m, K, replace=False)
    e[pos] = M * rng.standard_normal(K)
    return e


def gen_gaussian_sparse(N: int, m: int, s: int, eta: float = 0.0, M: float = 0.0,
                        K_corrupt: int = 0, seed=None) -> ProblemInstance:
    """s-sparse Gaussian signal measured by a column-normalized Gaussian matrix.

    Draw order from the seeded generator: support, signal values, matrix,
    bounded noise, corruptions.
    """
    if not 0 <= s <= N:
        raise ValueError(f"need 0 <= s <= N, got s={s}, N={N}")
    if m < 1:
        raise ValueError("m must be positive")
    rng = np.random.default_rng(seed)
    support = np.sort(rng.choice(N, s, replace=False))
    x = np.zeros(N)
    x[support] = rng.standard_normal(s)
    A, _ = normalize_columns(rng.standard_normal((m, N)))
    e_b = bounded_noise(rng, m, eta)
    e_u = sparse_corruption(rng, m, M, K_corrupt)
    y = A @ x + e_b + e_u
    meta = {
        "setting": "gaussian", "N": N, "m": m, "s": s, "eta": eta, "M": M,
        "K_corrupt": K_corrupt, "seed": _seed_meta(seed), "normalized": True,
        "support": [int(j) + 1 for j in support],
    }
    return ProblemInstance(A, y, np.ones(N), x, e_b, e_u, meta)


def gen_oracle_weights(true_support, known_fraction: float, w0: float, N: int, seed=None) -> np.ndarray:
    """Weights ``w0`` on a random part of the true support and 1 elsewhere.

    ``floor(known_fraction * s)`` support indices are drawn uniformly
    without replacement.
    """
    if not 0 <= known_fraction <= 1:
        raise ValueError("known_fraction must lie in [0, 1]")
    if not 0 < w0 <= 1:
        raise ValueError("w0 must lie in (0, 1]")
    true_support = np.asarray(true_support, dtype=np.intp)
    if true_support.size == 0 and known_fraction > 0:
        raise EmptySupport("cannot draw an oracle set from an empty support")
    rng = np.random.default_rng(seed)
    k = int(np.floor(known_fraction * true_support.size))
    w = np.ones(N)
    if k:
        w[rng.choice(true_support, k, replace=False)] = w0
    return w


def gen_function_approx(f: Callable, Lambda: MultiIndexSet, m: int, eta: float = 0.0,
                        M: float = 0.0, K_corrupt: int = 0, seed=None) -> ProblemInstance:
    """Scaled Legendre sampling matrix for recovering the expansion of `f`.

    ``A_ij = Psi_{nu_j}(t_i) / sqrt(m)`` and ``y_i = f(t_i) / sqrt(m)`` with
    ``t_i`` uniform on [-1, 1]^d, plus noise drawn as in the Gaussian
    setting. The columns of `A` are *not* normalized.
    """
    if m < 1:
        raise ValueError("m must be positive")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.0, 1.0, size=(m, Lambda.d))
    A = basis_matrix(Lambda, pts) / np.sqrt(m)
    clean = np.asarray(f(pts), dtype=float) / np.sqrt(m)
    e_b = bounded_noise(rng, m, eta)
    e_u = sparse_corruption(rng, m, M, K_corrupt)
    meta = {
        "setting": "function", "N": len(Lambda), "m": m, "d": Lambda.d, "eta": eta, "M": M,
        "K_corrupt": K_corrupt, "seed": _seed_meta(seed), "normalized": False,
        "multi_indices": [list(nu) for nu in Lambda],
    }
    return ProblemInstance(A, clean + e_b + e_u, intrinsic_weights(Lambda), None, e_b, e_u, meta)
