"""Binary-search query over bunches in O(log k) membership tests.

For each vertex ``u`` a search plan is precomputed: a binary tree whose nodes
are index ranges ``i1..i2`` of the pivot levels together with a split index
``i`` and the even ``j`` in ``i1..i-2`` maximizing
``delta_j(u) = d(u, p_{j+2}(u)) - d(u, p_j(u))``.  A query walks the plan
with two membership tests per node and finishes with a short ``dist_k`` walk.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .tz_core import (BunchSet, LevelHierarchy, NotApplicableError, PivotTable, QueryTrace,
                      compute_bunches, compute_pivots, dist_k, sample_levels)

MIN_PLAN_K = 16


def build_delta_table(pivots: PivotTable) -> np.ndarray:
    """``delta[u, i]`` for ``0 <= i < k - 2``."""
    k = pivots.k
    if k < 3:
        raise NotApplicableError("delta values need k >= 3")
    d = pivots.dist[:k]
    return np.ascontiguousarray((d[2:] - d[:-2]).T)


def range_argmax_naive(delta_row, lo: int, hi: int) -> int:
    """Even ``j`` in ``lo, lo+2, ..., hi-2`` with the largest delta; ties to smallest j."""
    best = lo
    for j in range(lo + 2, hi - 1, 2):
        if delta_row[j] > delta_row[best]:
            best = j
    return best


def leaf_length(k: int) -> int:
    return math.ceil(math.log2(k))


def middle_even(i1: int, i2: int) -> int:
    """Even index nearest to the midpoint of ``i1..i2`` (ties upward), kept inside
    ``[i1 + 2, i2 - 2]``."""
    i = 2 * ((i1 + i2 + 2) // 4)
    upper = i2 - 2 if i2 % 2 == 0 else i2 - 3
    return max(i1 + 2, min(i, upper))


class CanonicalArgmaxTree:
    """Static halving tree over the even indices shared by all vertices.

    A node covering even endpoints ``lo..hi`` stores, per vertex, the argmax of
    delta over ``lo..hi-2``.  Leaves cover two consecutive even indices.
    """

    def __init__(self, delta: np.ndarray, k: int):
        self.k = k
        top = k - 1 if (k - 1) % 2 == 0 else k - 2
        self.top = top
        self.lo: list[int] = []
        self.hi: list[int] = []
        self.children: list[tuple[int, int] | None] = []
        self.root = self._grow(0, top) if top >= 2 else -1
        n = delta.shape[0]
        self.argmax = np.zeros((n, len(self.lo)), dtype=np.int64)
        rows = np.arange(n)
        # children are created after their parent, so reverse order is bottom-up
        for node in range(len(self.lo) - 1, -1, -1):
            ch = self.children[node]
            if ch is None:
                self.argmax[:, node] = self.lo[node]
                continue
            a, b = self.argmax[:, ch[0]], self.argmax[:, ch[1]]
            self.argmax[:, node] = np.where(delta[rows, b] > delta[rows, a], b, a)
        self._argmax_rows = self.argmax.tolist()

    def _grow(self, lo: int, hi: int) -> int:
        node = len(self.lo)
        self.lo.append(lo)
        self.hi.append(hi)
        self.children.append(None)
        if hi - lo > 2:
            mid = lo + 2 * ((hi - lo) // 4)
            self.children[node] = (self._grow(lo, mid), self._grow(mid, hi))
        return node

    def __len__(self) -> int:
        return len(self.lo)

    def cover(self, lo: int, hi: int) -> list[int]:
        """Canonical nodes whose ranges partition ``lo..hi``."""
        out: list[int] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            a, b = self.lo[node], self.hi[node]
            if b <= lo or a >= hi:
                continue
            if lo <= a and b <= hi:
                out.append(node)
                continue
            left, right = self.children[node]
            stack.append(right)
            stack.append(left)
        return out

    def range_argmax(self, u: int, lo: int, hi: int, delta_row) -> int:
        if lo % 2 or hi % 2 or lo > hi - 2 or lo < 0 or hi > self.top:
            raise ValueError(f"invalid even range {lo}..{hi} for k={self.k}")
        row = self._argmax_rows[u]
        best = -1
        for node in self.cover(lo, hi):
            j = row[node]
            if best < 0 or delta_row[j] > delta_row[best] or (delta_row[j] == delta_row[best] and j < best):
                best = j
        return best


def range_argmax(u: int, lo: int, hi: int, tree: CanonicalArgmaxTree, delta: np.ndarray) -> int:
    return tree.range_argmax(u, lo, hi, delta[u])


@dataclass(frozen=True)
class PlanNode:
    i1: int
    i2: int
    i: int = -1
    j: int = -1
    fail: int = -1  # child starting at i, taken when both memberships fail
    hold: int = -1  # child ending at j

    @property
    def is_leaf(self) -> bool:
        return self.i < 0


def build_search_plan(u: int, delta: np.ndarray, tree: CanonicalArgmaxTree, k: int) -> list[PlanNode]:
    """Plan nodes for vertex ``u``, root first; empty when ``k`` is below 16."""
    if k < MIN_PLAN_K:
        return []
    cutoff = leaf_length(k)
    row = delta[u]
    nodes: list[PlanNode] = []

    def grow(i1: int, i2: int) -> int:
        idx = len(nodes)
        nodes.append(PlanNode(i1, i2))
        if i2 - i1 <= cutoff:
            return idx
        i = middle_even(i1, i2)
        j = tree.range_argmax(u, i1, i, row)
        fail = grow(i, i2)
        hold = grow(i1, j)
        nodes[idx] = PlanNode(i1, i2, i, j, fail, hold)
        return idx

    grow(0, k - 1)
    return nodes


def bdist_k(u: int, v: int, plan: list[PlanNode], bunches: BunchSet, pivots: PivotTable,
            trace: QueryTrace | None = None) -> float:
    if not plan:
        return dist_k(u, v, 0, bunches, pivots, trace)
    maps = bunches.maps
    piv = pivots.pivot_rows
    node = plan[0]
    while not node.is_leaf:
        j = node.j
        a = piv[j][u] in maps[v]
        b = piv[j + 1][v] in maps[u]
        failed = not a and not b
        if trace is not None:
            trace.probes += 2
            trace.log("plan", i1=node.i1, i2=node.i2, i=node.i, j=j, failed=failed)
        node = plan[node.fail if failed else node.hold]
    if trace is not None:
        trace.log("leaf", i1=node.i1, i2=node.i2)
    return dist_k(u, v, node.i1, bunches, pivots, trace)


@dataclass(frozen=True, eq=False)
class LogKOracle:
    graph: Graph
    levels: LevelHierarchy
    pivots: PivotTable
    bunches: BunchSet
    delta: np.ndarray | None
    plans: list[list[PlanNode]]

    @property
    def k(self) -> int:
        return self.levels.k

    def query(self, u: int, v: int, trace: QueryTrace | None = None) -> float:
        plan = self.plans[u] if self.plans else []
        return bdist_k(u, v, plan, self.bunches, self.pivots, trace)


def assemble_logk_oracle(g: Graph, levels: LevelHierarchy, pivots: PivotTable,
                         bunches: BunchSet) -> LogKOracle:
    k = levels.k
    delta = build_delta_table(pivots) if k >= 3 else None
    plans: list[list[PlanNode]] = []
    if k >= MIN_PLAN_K:
        tree = CanonicalArgmaxTree(delta, k)
        plans = [build_search_plan(u, delta, tree, k) for u in range(g.n)]
    return LogKOracle(g, levels, pivots, bunches, delta, plans)


def build_logk_oracle(g: Graph, k: int, seed: int = 0) -> LogKOracle:
    levels = sample_levels(g.n, k, seed)
    pivots = compute_pivots(g, levels)
    return assemble_logk_oracle(g, levels, pivots, compute_bunches(g, levels, pivots))
