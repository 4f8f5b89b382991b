"""Coarse constant-time distance estimators used to seed the refinement oracle.

Any estimator works as long as it never underestimates, overestimates by at
most ``alpha_bb * k``, and can enumerate every value it may return.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod

import numpy as np

from .graph import ExactDistances


class BlackBoxOracle(ABC):
    #: multiplicative stretch s with d <= estimate <= s * d
    stretch: float
    k: int

    @property
    def alpha_bb(self) -> float:
        return max(1.0, self.stretch / self.k)

    @abstractmethod
    def query(self, u: int, v: int) -> float: ...

    @abstractmethod
    def distance_set(self) -> list[float]:
        """Sorted, duplicate-free positive values covering every positive answer."""

    @abstractmethod
    def spec(self) -> str:
        """Short identity string, e.g. ``rounded`` or ``inflated:4``."""


class RoundedExactOracle(BlackBoxOracle):
    """Exact distances rounded up to the grid ``g0 * 2^e``, g0 the smallest positive distance."""

    stretch = 2.0

    def __init__(self, exact: ExactDistances, k: int):
        self.k = k
        mat = exact.matrix
        positive = mat[mat > 0]
        n = mat.shape[0]
        self._exp = np.full((n, n), -1, dtype=np.int64)
        if positive.size == 0:
            self.base = 0.0
            self.grid: list[float] = []
            self._rows = [[0.0] * n for _ in range(n)]
            return
        g0 = float(positive.min())
        self.base = g0
        top = int(math.ceil(math.log2(float(positive.max()) / g0))) + 1
        grid = [g0 * 2.0 ** e for e in range(top + 1)]
        exps = np.searchsorted(np.asarray(grid), mat, side="left")
        exps[mat == 0] = -1
        used = int(exps.max())
        self.grid = grid[:used + 1]
        table = np.where(exps >= 0, np.asarray(self.grid)[np.clip(exps, 0, used)], 0.0)
        self._exp = exps
        self._rows = table.tolist()

    def query(self, u: int, v: int) -> float:
        return self._rows[u][v]

    def distance_set(self) -> list[float]:
        return list(self.grid)

    def spec(self) -> str:
        return "rounded"


class InflatedOracle(BlackBoxOracle):
    """Multiplies another black box's answers by ``factor``; used to emulate loose estimators."""

    def __init__(self, inner: BlackBoxOracle, factor: float):
        if factor < 1:
            raise ValueError("inflation factor must be >= 1")
        self.inner = inner
        self.factor = float(factor)
        self.k = inner.k
        self.stretch = self.factor * inner.stretch

    def query(self, u: int, v: int) -> float:
        return self.factor * self.inner.query(u, v)

    def distance_set(self) -> list[float]:
        return [self.factor * x for x in self.inner.distance_set()]

    def spec(self) -> str:
        return f"inflated:{self.factor!r}"


def bb_query(o: BlackBoxOracle, u: int, v: int) -> float:
    return o.query(u, v)


def bb_distance_set(o: BlackBoxOracle) -> list[float]:
    return o.distance_set()


def make_blackbox(spec: str, exact: ExactDistances, k: int) -> BlackBoxOracle:
    """Parse ``rounded`` or ``inflated:<beta>``; ``beta`` may be written ``64k``."""
    base = RoundedExactOracle(exact, k)
    if spec == "rounded":
        return base
    if spec.startswith("inflated:"):
        arg = spec.split(":", 1)[1].strip()
        if arg.endswith("k"):
            factor = float(arg[:-1] or 1) * k
        else:
            factor = float(arg)
        return InflatedOracle(base, factor)
    raise ValueError(f"unknown black box {spec!r}")
