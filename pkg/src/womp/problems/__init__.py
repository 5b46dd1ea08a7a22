"""Test problems: sparse Gaussian recovery and polynomial function approximation."""

from womp.problems.generators import (
    EmptySupport,
    gen_function_approx,
    gen_gaussian_sparse,
    gen_oracle_weights,
)
from womp.problems.instance import ProblemInstance
from womp.problems.polynomials import (
    MonteCarloError,
    MultiIndexSet,
    OutOfDomain,
    ZeroFunction,
    basis_matrix,
    hyperbolic_cross,
    intrinsic_weights,
    iso_exponential,
    l2_error_estimate_mc,
    legendre_eval,
    legendre_table,
)

__all__ = [
    "EmptySupport",
    "MonteCarloError",
    "MultiIndexSet",
    "OutOfDomain",
    "ProblemInstance",
    "ZeroFunction",
    "basis_matrix",
    "gen_function_approx",
    "gen_gaussian_sparse",
    "gen_oracle_weights",
    "hyperbolic_cross",
    "intrinsic_weights",
    "iso_exponential",
    "l2_error_estimate_mc",
    "legendre_eval",
    "legendre_table",
]
