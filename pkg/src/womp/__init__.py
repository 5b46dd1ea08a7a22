"""Loss-function-based weighted orthogonal matching pursuit.

Greedy sparse recovery driven by weighted LASSO, square-root LASSO and
LAD-LASSO loss reductions, with problem generators and an experiment
harness for tuning-parameter and iteration sweeps.
"""

from womp.linalg import (
    DimensionMismatch,
    LstsqResult,
    RankDeficient,
    ZeroColumn,
    least_squares_restricted,
    normalize_columns,
    residual,
)
from womp.losses import Family, LossSpec, Regularizer, eval_loss, weighted_l0_norm, weighted_l1_norm
from womp.selection import RULES, SelectionContext, score_all, univariate_lad_argmin
from womp.solvers import GreedyTrace, SolverOptions, lad_restricted, omp_run, relative_l2_error

__all__ = [
    "DimensionMismatch",
    "Family",
    "GreedyTrace",
    "LossSpec",
    "LstsqResult",
    "RULES",
    "RankDeficient",
    "Regularizer",
    "SelectionContext",
    "SolverOptions",
    "ZeroColumn",
    "eval_loss",
    "lad_restricted",
    "least_squares_restricted",
    "normalize_columns",
    "omp_run",
    "relative_l2_error",
    "residual",
    "score_all",
    "univariate_lad_argmin",
    "weighted_l0_norm",
    "weighted_l1_norm",
]
