"""Sweep configuration files."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from womp.losses import Family, LossSpec
from womp.selection import RULES


class Setting(enum.Enum):
    GAUSSIAN_SPARSE = "gaussian_sparse"
    GAUSSIAN_ORACLE = "gaussian_oracle"
    FUNCTION_APPROX = "function_approx"


_SETTING_ALIASES = {
    "gaussian": Setting.GAUSSIAN_SPARSE,
    "gaussiansparse": Setting.GAUSSIAN_SPARSE,
    "oracle": Setting.GAUSSIAN_ORACLE,
    "gaussianoracle": Setting.GAUSSIAN_ORACLE,
    "function": Setting.FUNCTION_APPROX,
    "functionapprox": Setting.FUNCTION_APPROX,
}

DEFAULT_LAMBDA_RANGE = {
    Family.LASSO: (1e-4, 1e1),
    Family.SRLASSO: (1e-4, 1e1),
    Family.LADLASSO: (1e-3, 1e1),
}


def parse_setting(value) -> Setting:
    if isinstance(value, Setting):
        return value
    key = str(value).strip().lower()
    try:
        return Setting(key)
    except ValueError:
        pass
    key = key.replace("_", "").replace("-", "")
    if key in _SETTING_ALIASES:
        return _SETTING_ALIASES[key]
    raise ValueError(f"unknown setting {value!r}")


def _as_list(v):
    if v is None:
        return None
    if isinstance(v, (list, tuple)):
        return [float(a) for a in v]
    return [float(v)]


@dataclass(frozen=True)
class Level:
    """One overlaid curve: noise level, corruption fraction and oracle weight."""

    index: int
    eta: float
    corrupt_fraction: float
    w0: float
    K_corrupt: int

    @property
    def desc(self) -> str:
        return f"eta={self.eta:g};K={self.K_corrupt};w0={self.w0:g}"


@dataclass
class SweepConfig:
    setting: Setting = Setting.GAUSSIAN_SPARSE
    rule: str = "lasso-l1"
    N: int = 300
    m: int = 150
    s: int = 10
    d: int = 5
    hc_order: int = 18
    eta_list: list = field(default_factory=lambda: [1e-3])
    M: float = 0.0
    corrupt_fraction_list: list = field(default_factory=lambda: [0.0])
    w0: list = field(default_factory=lambda: [1.0])
    oracle_fraction: float = 0.5
    lambda_min: float | None = None
    lambda_max: float | None = None
    lambda_count: int = 50
    K: int = 30
    n_trials: int = 25
    base_seed: int = 0
    mc_points: int = 10_000
    out: str = "sweep.csv"

    def __post_init__(self):
        self.setting = parse_setting(self.setting)
        self.rule = str(self.rule).lower()
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}; expected one of {sorted(RULES)}")
        for name in ("eta_list", "corrupt_fraction_list", "w0"):
            setattr(self, name, _as_list(getattr(self, name)))
            if not getattr(self, name):
                raise ValueError(f"{name} must be nonempty")
        for name in ("N", "m", "s", "d", "hc_order", "lambda_count", "K", "n_trials", "base_seed", "mc_points"):
            setattr(self, name, int(getattr(self, name)))
        if self.n_trials < 1:
            raise ValueError("n_trials must be at least 1")
        if self.lambda_count < 1:
            raise ValueError("lambda_count must be at least 1")
        lo, hi = DEFAULT_LAMBDA_RANGE[self.spec.family]
        self.lambda_min = lo if self.lambda_min is None else float(self.lambda_min)
        self.lambda_max = hi if self.lambda_max is None else float(self.lambda_max)
        single = self.lambda_count == 1 and self.lambda_min == self.lambda_max
        if single and self.lambda_min < 0:
            raise ValueError("lambda must be nonnegative")
        if not single and not 0 < self.lambda_min <= self.lambda_max:
            raise ValueError("need 0 < lambda_min <= lambda_max")

    @property
    def spec(self) -> LossSpec:
        return LossSpec.from_rule(self.rule)

    @property
    def lambda_grid(self) -> np.ndarray:
        """Log-spaced grid from ``lambda_min`` to ``lambda_max``."""
        if self.lambda_count == 1 and self.lambda_min == self.lambda_max:
            # a single point may be 0 (pure-fidelity greedy runs)
            return np.array([self.lambda_min])
        return np.logspace(np.log10(self.lambda_min), np.log10(self.lambda_max), self.lambda_count)

    @property
    def levels(self) -> list[Level]:
        out = []
        combos = itertools.product(self.eta_list, self.corrupt_fraction_list, self.w0)
        for i, (eta, frac, w0) in enumerate(combos):
            out.append(Level(i, eta, frac, w0, int(round(frac * self.m))))
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "SweepConfig":
        data = yaml.safe_load(Path(path).read_text()) or {}
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["setting"] = self.setting.value
        return d
