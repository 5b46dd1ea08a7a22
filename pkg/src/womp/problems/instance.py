"""Problem instances and their JSON file format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FORMAT = "womp-instance/1"


@dataclass
class ProblemInstance:
    """Measurements ``y = A x_true + e_bounded + e_unbounded`` and weights.

    ``x_true`` and the noise parts are ``None`` when unknown (function
    approximation has no exact coefficient vector).
    """

    A: np.ndarray
    y: np.ndarray
    w: np.ndarray
    x_true: np.ndarray | None = None
    e_bounded: np.ndarray | None = None
    e_unbounded: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    def check(self, atol: float = 1e-12) -> None:
        if self.x_true is None or self.e_bounded is None or self.e_unbounded is None:
            return
        pred = self.A @ self.x_true + self.e_bounded + self.e_unbounded
        if not np.allclose(pred, self.y, rtol=0, atol=atol * (1 + np.abs(self.y).max())):
            raise ValueError("y is inconsistent with A x_true + noise")

    def to_dict(self) -> dict:
        def vec(v):
            return None if v is None else [float(a) for a in v]

        m, n = self.A.shape
        return {
            "format": FORMAT,
            "rows": m,
            "cols": n,
            "A": [float(a) for a in self.A.ravel(order="C")],
            "y": vec(self.y),
            "w": vec(self.w),
            "x_true": vec(self.x_true),
            "e_bounded": vec(self.e_bounded),
            "e_unbounded": vec(self.e_unbounded),
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemInstance":
        if data.get("format") != FORMAT:
            raise ValueError(f"unsupported instance format {data.get('format')!r}")
        m, n = int(data["rows"]), int(data["cols"])

        def vec(key):
            v = data.get(key)
            return None if v is None else np.asarray(v, dtype=float)

        A = np.asarray(data["A"], dtype=float).reshape(m, n)
        return cls(A, vec("y"), vec("w"), vec("x_true"), vec("e_bounded"), vec("e_unbounded"), dict(data.get("meta", {})))

    def save(self, path) -> None:
        # json writes floats with repr, which round-trips binary64 exactly
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> "ProblemInstance":
        return cls.from_dict(json.loads(Path(path).read_text()))
