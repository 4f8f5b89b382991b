"""Geometric value lists: the epsilon-comb, chain expansion and tau lookups."""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Sequence

MERGE_RTOL = 1e-12


def clamp_eps(eps: float) -> float:
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return min(eps, 0.5)


def comb_epsilon(values: Sequence[float], eps: float) -> list[float]:
    """Epsilon-comb of a sorted positive sequence, returned ascending.

    One descending pass: keep the maximum, then repeatedly emit the smaller of
    the next remaining value and ``last / (1 + eps)`` and discard every
    remaining value at or above what was emitted.
    """
    if len(values) == 0:
        raise ValueError("comb of an empty set")
    if values[0] <= 0:
        raise ValueError("comb values must be positive")
    desc = sorted(values, reverse=True)
    out = [desc[0]]
    factor = 1.0 + eps
    idx = 1
    n = len(desc)
    while idx < n and desc[idx] >= out[-1]:
        idx += 1
    while idx < n:
        last = out[-1]
        s = min(desc[idx], last / factor)
        # keep the spacing exact in floating point: s * (1 + eps) <= last
        while s * factor > last:
            s = math.nextafter(s, 0.0)
        out.append(s)
        while idx < n and desc[idx] >= s:
            idx += 1
    out.reverse()
    return out


def chain_length(eps: float, alpha: float) -> int:
    return math.ceil(math.log(2 * alpha * (1 + eps)) / math.log(1 + eps))


def merge_close(values: Sequence[float], rtol: float = MERGE_RTOL) -> list[float]:
    """Sort and collapse runs of values equal within ``rtol``; the largest of a run survives."""
    out: list[float] = []
    for x in sorted(values, reverse=True):
        if out and out[-1] - x <= rtol * out[-1]:
            continue
        out.append(x)
    out.reverse()
    return out


def expand_chains(base: Sequence[float], eps: float, alpha: float) -> list[float]:
    """Union of ``d / (1 + eps)^i`` for ``0 <= i <= imax`` over all ``d`` in ``base``."""
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    imax = chain_length(eps, alpha)
    factor = 1.0 + eps
    vals = []
    for d in base:
        x = d
        vals.append(x)
        for _ in range(imax):
            x = x / factor
            vals.append(x)
    return merge_close(vals)


@dataclass
class EpsComb:
    eps: float
    alpha: float
    imax: int
    values: list[float]
    head_index: dict[float, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.values)

    def head(self, d: float) -> int:
        return self.head_index[d]


def build_eps_comb(base: Sequence[float], eps: float, alpha: float) -> EpsComb:
    imax = chain_length(eps, alpha)
    base = sorted(set(base))
    if not base:
        return EpsComb(eps, alpha, imax, [], {})
    values = comb_epsilon(expand_chains(base, eps, alpha), eps)
    head_index = {}
    for d in base:
        # the unique comb value in [d, (1 + eps) d) is the smallest one >= d
        idx = bisect_right(values, d) - 1
        if idx < 0 or values[idx] < d:
            idx += 1
        head_index[d] = idx
    return EpsComb(eps, alpha, imax, values, head_index)


def tau_lookup(values: Sequence[float], x: float) -> float:
    """Largest element of ``values`` not exceeding ``x``."""
    return values[tau_index(values, x)]


def tau_index(values: Sequence[float], x: float) -> int:
    idx = bisect_right(values, x) - 1
    if idx < 0:
        raise ValueError(f"{x} is below the smallest value {values[0] if values else None}")
    return idx
