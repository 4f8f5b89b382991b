"""Constant query time oracle: refine a coarse black-box estimate with bunches.

The black-box answer is snapped to a comb value (the head) and then walked
down the comb one ``(1 + eps)`` factor at a time while the bunch tests say the
estimate can still shrink.  Each comb step needs the largest even pivot level
within the current estimate; per-vertex pointers stored on a few comb entries
provide it in O(1), carried across entries where it cannot change.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .blackbox import BlackBoxOracle
from .comb import EpsComb, build_eps_comb
from .graph import Graph
from .logk_oracle import build_delta_table
from .tz_core import (BunchSet, LevelHierarchy, NotApplicableError, PivotTable, QueryTrace,
                      compute_bunches, compute_pivots, sample_levels)

MIN_CONST_K = 4


def interval_points(sorted_dists) -> list[float]:
    """Endpoints of the quarter subdivisions of consecutive sorted bunch distances."""
    pts: list[float] = []
    for a, b in zip(sorted_dists, sorted_dists[1:]):
        if b <= a:
            continue
        step = (b - a) / 4.0
        for t in range(4):
            x = a + t * step
            if not pts or x > pts[-1]:
                pts.append(x)
    if sorted_dists and (not pts or sorted_dists[-1] > pts[-1]):
        pts.append(sorted_dists[-1])
    return pts


def even_level(dist_row, k: int, d: float) -> int:
    """Largest even level i with ``dist_row[i] <= d`` (``dist_row`` indexed by level)."""
    best = 0
    for i in range(2, k, 2):
        if dist_row[i] <= d:
            best = i
        else:
            break
    return best


def build_pointer_index(comb_values, intervals: list[list[float]], pivots: PivotTable) -> list[dict[int, int]]:
    """Pointers for each vertex on the first and last comb entry of every tau group.

    Two sweeps over the merged sorted list of comb values and all interval
    points: the descending sweep finds the smallest comb value mapped to each
    point, the ascending sweep the largest.  At equal values an interval point
    sorts before a comb value, matching ``tau(x) = max{s <= x}``.
    """
    n = len(intervals)
    k = pivots.k
    even_rows = [[row[i] for i in range(0, k, 2)] for row in pivots.dist[:k].T.tolist()]
    merged = [(d, 1, c) for c, d in enumerate(comb_values)]
    for u, pts in enumerate(intervals):
        merged.extend((s, 0, u) for s in pts)
    merged.sort()

    pointers: list[dict[int, int]] = [{} for _ in range(n)]

    def point(u: int, c: int, tau: float) -> None:
        pointers[u][c] = 2 * (bisect_right(even_rows[u], tau) - 1)

    prev = [math.inf] * n
    last = None  # (value, comb index) most recently swept
    for d, tag, x in reversed(merged):
        if tag:
            last = (d, x)
            continue
        if last is not None and d <= last[0] < prev[x]:
            point(x, last[1], d)
        prev[x] = d

    prev = [-math.inf] * n
    last = None
    for d, tag, x in merged:
        if tag:
            last = (d, x)
            continue
        if last is not None and prev[x] <= last[0] < d:
            point(x, last[1], prev[x])
        prev[x] = d
    if last is not None:
        for u in range(n):
            if intervals[u] and last[0] >= intervals[u][-1]:
                point(u, last[1], intervals[u][-1])
    return pointers


def prefix_argmax_table(delta: np.ndarray, k: int) -> np.ndarray:
    """``table[u, i]`` for even ``i >= 2``: even j in ``0..i-2`` maximizing delta_j(u); -1 elsewhere."""
    n = delta.shape[0]
    table = np.full((n, k), -1, dtype=np.int64)
    best = np.zeros(n, dtype=np.int64)
    rows = np.arange(n)
    for i in range(2, k, 2):
        j = i - 2
        if j > 0:
            best = np.where(delta[:, j] > delta[rows, best], j, best)
        table[:, i] = best
    return table


@dataclass(frozen=True, eq=False)
class ConstOracle:
    graph: Graph
    levels: LevelHierarchy
    pivots: PivotTable
    bunches: BunchSet
    delta: np.ndarray
    comb: EpsComb
    intervals: list[list[float]]
    pointers: list[dict[int, int]]
    prefix: np.ndarray
    blackbox: BlackBoxOracle
    eps: float

    def __post_init__(self):
        object.__setattr__(self, "_prefix_rows", self.prefix.tolist())

    @property
    def k(self) -> int:
        return self.levels.k

    @property
    def eps_inner(self) -> float:
        return self.eps / 2

    @property
    def alpha_bb(self) -> float:
        return self.blackbox.alpha_bb

    @property
    def alpha(self) -> float:
        return (1 + self.eps_inner) * self.alpha_bb

    @property
    def loop_cap(self) -> int:
        return math.ceil(math.log(2 * self.alpha) / math.log(1 + self.eps_inner))

    @property
    def window(self) -> int:
        return math.ceil(math.log(2 * self.alpha_bb) / math.log(1 + self.eps_inner))

    def refine_further(self, u: int, v: int, iu: int, trace: QueryTrace | None = None) -> bool:
        # all tests are evaluated so that every call costs the same number of probes
        maps = self.bunches.maps
        piv = self.pivots.pivot_rows
        hit = False
        if iu >= 2:
            j = self._prefix_rows[u][iu]
            hit = _probe(piv[j][u], maps[v], trace) | _probe(piv[j + 1][v], maps[u], trace)
        hit |= _probe(piv[iu][u], maps[v], trace)
        if iu + 1 < self.k:
            hit |= _probe(piv[iu + 1][v], maps[u], trace)
        return hit

    def refine_dist(self, u: int, v: int, head: int, iu: int,
                    trace: QueryTrace | None = None, origin: int | None = None) -> float:
        """Walk the comb down from ``head`` with the pivot level ``iu`` valid there.

        ``origin`` is the comb index the starting pointer was read from.
        """
        values = self.comb.values
        ptr = self.pointers[u]
        idx = head
        if not self.refine_further(u, v, iu, trace):
            if trace is not None:
                trace.log("refine_end", u=u, v=v, ended="line3", line=3, d_u=values[idx], iu=iu, iu_prime=None)
            return values[idx]
        cap = self.loop_cap
        count = 0
        entry = head if origin is None else origin
        while True:
            prev_iu = iu
            idx -= 1
            count += 1
            if trace is not None:
                trace.steps += 1
            if idx in ptr:
                iu = ptr[idx]
                entry = idx
            if trace is not None:
                trace.log("refine_step", u=u, idx=idx, d_u=values[idx], iu=iu, entry=entry)
            if count >= cap:
                ended = "cap"
                break
            if not self.refine_further(u, v, iu, trace):
                ended = "false"
                break
        est, line = self._finish(u, v, prev_iu, trace)
        if trace is not None:
            trace.log("refine_end", u=u, v=v, ended=ended, line=line, d_u=values[idx], iu=iu, iu_prime=prev_iu)
        return est

    def _finish(self, u: int, v: int, iu: int, trace: QueryTrace | None) -> tuple[float, int]:
        maps = self.bunches.maps
        piv = self.pivots.pivot_rows
        pd = self.pivots.dist_rows
        if iu >= 2:
            j = self._prefix_rows[u][iu]
            wj, wj1 = piv[j][u], piv[j + 1][v]
            in12 = _probe(wj, maps[v], trace)
            in13 = _probe(wj1, maps[u], trace)
        else:
            in12 = in13 = False
        wi, wi1 = piv[iu][u], piv[iu + 1][v] if iu + 1 < self.k else -1
        in14 = _probe(wi, maps[v], trace)
        in15 = wi1 >= 0 and _probe(wi1, maps[u], trace)
        if in12:
            return pd[j][u] + maps[v][wj], 12
        if in13:
            return maps[u][wj1] + pd[j + 1][v], 13
        if in14:
            return pd[iu][u] + maps[v][wi], 14
        if not in15:
            raise RuntimeError(f"refinement invariant broken for pair ({u}, {v})")
        return maps[u][wi1] + pd[iu + 1][v], 15

    def query(self, u: int, v: int, trace: QueryTrace | None = None) -> float:
        if u == v:
            return 0.0
        e = self.blackbox.query(u, v)
        if e == 0:
            return 0.0
        head = self.comb.head_index[e]
        pu, pv = self.pointers[u], self.pointers[v]
        for t in range(self.window + 1):
            c = head - t
            if t and trace is not None:
                trace.steps += 1
            if c in pu:
                if trace is not None:
                    trace.log("scan", found="u", offset=t, head=head)
                return self.refine_dist(u, v, head, pu[c], trace, c)
            if c in pv:
                if trace is not None:
                    trace.log("scan", found="v", offset=t, head=head)
                return self.refine_dist(v, u, head, pv[c], trace, c)
        j_min = head - self.window
        est = 2 * self.comb.values[j_min]
        if trace is not None:
            trace.log("fallback", head=head, j_min=j_min, estimate=est)
        return est

    def stats(self) -> dict:
        return {
            "bunch_total": self.bunches.total_size(),
            "comb_size": len(self.comb),
            "blackbox_values": len(self.blackbox.distance_set()),
            "pointer_total": sum(len(p) for p in self.pointers),
            "interval_points": sum(len(s) for s in self.intervals),
        }


def _probe(w: int, bunch: dict, trace: QueryTrace | None) -> bool:
    if trace is not None:
        trace.probes += 1
    return w in bunch


def assemble_const_oracle(g: Graph, levels: LevelHierarchy, pivots: PivotTable, bunches: BunchSet,
                          eps: float, bb: BlackBoxOracle) -> ConstOracle:
    k = levels.k
    if k < MIN_CONST_K:
        raise NotApplicableError(f"constant-time oracle needs k >= {MIN_CONST_K}, got {k}")
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    if bb.k != k:
        raise ValueError(f"black box built for k={bb.k}, oracle has k={k}")
    delta = build_delta_table(pivots)
    comb = build_eps_comb(bb.distance_set(), eps / 2, bb.alpha_bb)
    intervals = [interval_points(p) for p in bunches.sorted_dists]
    pointers = build_pointer_index(comb.values, intervals, pivots)
    prefix = prefix_argmax_table(delta, k)
    return ConstOracle(g, levels, pivots, bunches, delta, comb, intervals, pointers, prefix, bb, eps)


def build_const_oracle(g: Graph, k: int, eps: float, bb: BlackBoxOracle, seed: int = 0) -> ConstOracle:
    if k < MIN_CONST_K:
        raise NotApplicableError(f"constant-time oracle needs k >= {MIN_CONST_K}, got {k}")
    levels = sample_levels(g.n, k, seed)
    pivots = compute_pivots(g, levels)
    return assemble_const_oracle(g, levels, pivots, compute_bunches(g, levels, pivots), eps, bb)
