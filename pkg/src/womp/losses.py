"""Weighted norms and the six regularized loss functionals."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from womp.linalg import DimensionMismatch, residual


class Family(enum.Enum):
    LASSO = "lasso"
    SRLASSO = "srlasso"
    LADLASSO = "ladlasso"


class Regularizer(enum.Enum):
    L1W = "l1"
    L0W = "l0"


def as_weights(w, n: int | None = None) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 1:
        raise DimensionMismatch(f"weights must be 1-D, got shape {w.shape}")
    if n is not None and w.size != n:
        raise DimensionMismatch(f"expected {n} weights, got {w.size}")
    if not np.all(w > 0):
        raise ValueError("weights must be strictly positive")
    return w


@dataclass(frozen=True)
class LossSpec:
    """Loss family, regularizer and tuning parameter ``lam``."""

    family: Family
    regularizer: Regularizer
    lam: float = 0.0

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam}")

    @property
    def rule(self) -> str:
        """Rule name as used on the command line, e.g. ``"srlasso-l1"``."""
        return f"{self.family.value}-{self.regularizer.value}"

    @classmethod
    def from_rule(cls, rule: str, lam: float = 0.0) -> "LossSpec":
        try:
            fam, reg = rule.lower().split("-")
            return cls(Family(fam), Regularizer(reg), float(lam))
        except ValueError:
            raise ValueError(f"unknown rule {rule!r}") from None

    def with_lambda(self, lam: float) -> "LossSpec":
        return LossSpec(self.family, self.regularizer, float(lam))


def _check_pair(z, w):
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    if z.shape != w.shape:
        raise DimensionMismatch(f"z {z.shape} vs w {w.shape}")
    return z, w


def weighted_l1_norm(z, w) -> float:
    z, w = _check_pair(z, w)
    return float(np.sum(w * np.abs(z)))


def weighted_l0_norm(z, w) -> float:
    # exact zero test: solvers write exact zeros off the support
    z, w = _check_pair(z, w)
    return float(np.sum(w[z != 0.0] ** 2))


def fidelity(family: Family, r) -> float:
    """Data-fidelity term of `family` evaluated at the residual `r`."""
    r = np.asarray(r, dtype=float)
    if family is Family.LASSO:
        return float(r @ r)
    if family is Family.SRLASSO:
        return float(np.linalg.norm(r))
    return float(np.sum(np.abs(r)))


def penalty(reg: Regularizer, z, w) -> float:
    if reg is Regularizer.L1W:
        return weighted_l1_norm(z, w)
    return weighted_l0_norm(z, w)


def eval_loss(spec: LossSpec, A, y, w, z) -> float:
    """Evaluate ``F(y - A z) + lam * R_w(z)`` for the loss named by `spec`."""
    r = residual(A, z, y)
    w = as_weights(w, np.shape(z)[0])
    return fidelity(spec.family, r) + spec.lam * penalty(spec.regularizer, z, w)
