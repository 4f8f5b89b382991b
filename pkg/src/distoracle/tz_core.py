"""Sample hierarchy, pivots, bunches and the alternating bunch query."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .graph import EXACT_SIZE_LIMIT, ExactDistances, Graph, SizeGuardError, multi_source_dijkstra


class NotApplicableError(ValueError):
    """Raised when an engine is asked for a ``k`` it does not support."""


@dataclass
class QueryTrace:
    """Per-query operation counters plus an optional event log for tests."""

    probes: int = 0
    steps: int = 0
    events: list = field(default_factory=list)

    def log(self, kind: str, **data) -> None:
        self.events.append((kind, data))

    def of_kind(self, kind: str) -> list[dict]:
        return [d for k, d in self.events if k == kind]


@dataclass(frozen=True, eq=False)
class LevelHierarchy:
    k: int
    level: np.ndarray  # largest i with v in A_i

    @property
    def n(self) -> int:
        return len(self.level)

    def members(self, i: int) -> list[int]:
        return np.flatnonzero(self.level >= i).tolist()

    def sizes(self) -> list[int]:
        return [int(np.count_nonzero(self.level >= i)) for i in range(self.k)]


def sample_levels(n: int, k: int, seed: int = 0) -> LevelHierarchy:
    """Nested samples A_0 = V, each level keeping vertices with probability n^(-1/k).

    The whole hierarchy is redrawn from the same stream until A_{k-1} is non-empty.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    p = n ** (-1.0 / k)
    while True:
        # a vertex reaches level i iff its first i coin flips all succeed
        flips = rng.random((k - 1, n)) < p
        level = np.cumprod(flips, axis=0).sum(axis=0).astype(np.int64)
        if np.any(level == k - 1):
            return LevelHierarchy(k, level)


@dataclass(frozen=True, eq=False)
class PivotTable:
    """``pivot[i][v]`` is p_i(v); ``dist[i][v]`` is its distance, with ``dist[k]`` = inf."""

    pivot: np.ndarray  # (k, n) int
    dist: np.ndarray  # (k + 1, n) float

    @property
    def k(self) -> int:
        return self.pivot.shape[0]

    @cached_property
    def pivot_rows(self) -> list[list[int]]:
        return self.pivot.tolist()

    @cached_property
    def dist_rows(self) -> list[list[float]]:
        return self.dist.tolist()


def compute_pivots(g: Graph, levels: LevelHierarchy) -> PivotTable:
    k, n = levels.k, g.n
    pivot = np.empty((k, n), dtype=np.int64)
    dist = np.full((k + 1, n), math.inf)
    pivot[0] = np.arange(n)
    dist[0] = 0.0
    for i in range(1, k):
        d, w = multi_source_dijkstra(g, levels.members(i))
        pivot[i] = w
        dist[i] = d
    return PivotTable(pivot, dist)


@dataclass(frozen=True, eq=False)
class BunchSet:
    """``maps[u]`` sends each w in B_u to d(u, w); ``sorted_dists[u]`` is P_u."""

    maps: list[dict[int, float]]
    sorted_dists: list[list[float]]

    @classmethod
    def from_maps(cls, maps: list[dict[int, float]]) -> "BunchSet":
        return cls(maps, [sorted(set(m.values())) for m in maps])

    def total_size(self) -> int:
        return sum(len(m) for m in self.maps)

    def __len__(self) -> int:
        return len(self.maps)


def compute_bunches(g: Graph, levels: LevelHierarchy, pivots: PivotTable) -> BunchSet:
    """Bunches as inverses of clusters C(w) = {v : d(w, v) < d(v, A_{i+1})}.

    Each cluster is grown by a Dijkstra that only relaxes into vertices
    satisfying the cluster condition; clusters are closed under shortest-path
    prefixes, so the pruned search is exact.
    """
    n, k = g.n, levels.k
    adj = g.adjacency
    maps: list[dict[int, float]] = [{} for _ in range(n)]
    level = levels.level.tolist()
    bound_rows = pivots.dist.tolist()
    for w in range(n):
        bound = bound_rows[level[w] + 1]
        if not 0.0 < bound[w]:
            # w is tied with an A_{i+1} vertex at distance 0: C(w) is empty
            continue
        dist = {w: 0.0}
        heap = [(0.0, w)]
        while heap:
            d, x = heapq.heappop(heap)
            if d > dist[x]:
                continue
            maps[x][w] = d
            for y, wt in adj[x]:
                nd = d + wt
                if nd < bound[y] and nd < dist.get(y, math.inf):
                    dist[y] = nd
                    heapq.heappush(heap, (nd, y))
    return BunchSet.from_maps(maps)


def naive_bunches(g: Graph, levels: LevelHierarchy, pivots: PivotTable,
                  exact: ExactDistances) -> BunchSet:
    """Evaluate the bunch definition directly from the all-pairs matrix."""
    if g.n > EXACT_SIZE_LIMIT:
        raise SizeGuardError(f"n={g.n} exceeds exact-oracle limit {EXACT_SIZE_LIMIT}")
    lvl = levels.level
    maps = []
    for u in range(g.n):
        thresh = pivots.dist[lvl + 1, u]
        row = exact.matrix[u]
        members = np.flatnonzero(row < thresh)
        maps.append({int(w): float(row[w]) for w in members})
    return BunchSet.from_maps(maps)


def dist_k(u: int, v: int, i: int, bunches: BunchSet, pivots: PivotTable,
           trace: QueryTrace | None = None) -> float:
    """Alternating pivot walk starting at level ``i``; roles of u and v swap each step."""
    maps = bunches.maps
    piv = pivots.pivot_rows
    pd = pivots.dist_rows
    j = i
    w = piv[j][u]
    while True:
        if trace is not None:
            trace.probes += 1
            trace.log("dist_k", j=j, u=u, v=v, w=w, du=pd[j][u])
        if w in maps[v]:
            break
        j += 1
        u, v = v, u
        w = piv[j][u]
    return pd[j][u] + maps[v][w]


@dataclass(frozen=True, eq=False)
class TZOracle:
    """Classic bunch oracle answering with ``dist_k(u, v, 0)``."""

    graph: Graph
    levels: LevelHierarchy
    pivots: PivotTable
    bunches: BunchSet

    @property
    def k(self) -> int:
        return self.levels.k

    def query(self, u: int, v: int, trace: QueryTrace | None = None) -> float:
        return dist_k(u, v, 0, self.bunches, self.pivots, trace)


def build_tz_oracle(g: Graph, k: int, seed: int = 0) -> TZOracle:
    levels = sample_levels(g.n, k, seed)
    pivots = compute_pivots(g, levels)
    return TZOracle(g, levels, pivots, compute_bunches(g, levels, pivots))
