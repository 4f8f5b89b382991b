"""Weighted undirected graphs, Dijkstra primitives and the exact-distance oracle.

Graphs are stored in compressed adjacency form (``offsets``/``neighbors``/
``weights``) and are immutable once built.  The text format is::

    # comment
    n m
    u v w
    ...
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _scipy_dijkstra

EXACT_SIZE_LIMIT = 4096


class GraphError(ValueError):
    pass


class GraphFormatError(GraphError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NegativeWeightError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class DisconnectedGraphError(GraphError):
    pass


class InfeasibleParametersError(GraphError):
    pass


class SizeGuardError(GraphError):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected graph with non-negative weights in CSR form.

    Parallel edges are collapsed to their minimum weight by :meth:`from_edges`.
    """

    n: int
    offsets: np.ndarray
    neighbors: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, float]],
                   check_connected: bool = True) -> "Graph":
        if n < 1:
            raise GraphError("graph needs at least one vertex")
        best: dict[tuple[int, int], float] = {}
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise SelfLoopError(f"self-loop at vertex {u}")
            if not w >= 0.0 or math.isinf(w):
                raise NegativeWeightError(f"edge ({u}, {v}) has weight {w}")
            key = (u, v) if u < v else (v, u)
            if key not in best or w < best[key]:
                best[key] = w
        adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for (u, v), w in sorted(best.items()):
            adj[u].append((v, w))
            adj[v].append((u, w))
        offsets = np.zeros(n + 1, dtype=np.int64)
        for u in range(n):
            adj[u].sort()
            offsets[u + 1] = offsets[u] + len(adj[u])
        neighbors = np.fromiter((v for row in adj for v, _ in row), dtype=np.int64,
                                count=int(offsets[-1]))
        weights = np.fromiter((w for row in adj for _, w in row), dtype=np.float64,
                              count=int(offsets[-1]))
        g = cls(n, offsets, neighbors, weights)
        if check_connected and not g.is_connected():
            raise DisconnectedGraphError("graph is not connected")
        return g

    @property
    def m(self) -> int:
        return int(self.offsets[-1]) // 2

    @cached_property
    def adjacency(self) -> list[list[tuple[int, float]]]:
        """Per-vertex ``(neighbor, weight)`` lists for the pure-Python loops."""
        nb = self.neighbors.tolist()
        wt = self.weights.tolist()
        off = self.offsets.tolist()
        return [list(zip(nb[off[u]:off[u + 1]], wt[off[u]:off[u + 1]])) for u in range(self.n)]

    def edges(self) -> list[tuple[int, int, float]]:
        out = []
        for u, row in enumerate(self.adjacency):
            out.extend((u, v, w) for v, w in row if u < v)
        return out

    def is_connected(self) -> bool:
        seen = bytearray(self.n)
        seen[0] = 1
        stack = [0]
        count = 1
        adj = self.adjacency
        while stack:
            u = stack.pop()
            for v, _ in adj[u]:
                if not seen[v]:
                    seen[v] = 1
                    count += 1
                    stack.append(v)
        return count == self.n

    def to_csr(self) -> csr_matrix:
        return csr_matrix((self.weights, self.neighbors, self.offsets), shape=(self.n, self.n))


def parse_graph(text: str) -> Graph:
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 2:
                raise GraphFormatError("expected header 'n m'", lineno)
            header = (_parse_int(parts[0], raw, 0, lineno), _parse_int(parts[1], raw, 1, lineno))
            continue
        if len(parts) != 3:
            raise GraphFormatError("expected edge 'u v w'", lineno)
        u = _parse_int(parts[0], raw, 0, lineno)
        v = _parse_int(parts[1], raw, 1, lineno)
        try:
            w = float(parts[2])
        except ValueError:
            raise GraphFormatError(f"bad weight {parts[2]!r}", lineno, _column(raw, 2)) from None
        n = header[0]
        for idx, x in ((0, u), (1, v)):
            if not 0 <= x < n:
                raise GraphFormatError(f"vertex {x} out of range", lineno, _column(raw, idx))
        if u == v:
            raise SelfLoopError(f"line {lineno}: self-loop at vertex {u}")
        if not w >= 0.0:
            raise NegativeWeightError(f"line {lineno}: negative weight {w}")
        edges.append((u, v, w))
    if header is None:
        raise GraphFormatError("missing header", 1)
    n, m = header
    if len(edges) != m:
        raise GraphFormatError(f"header declares {m} edges, found {len(edges)}", lineno)
    return Graph.from_edges(n, edges)


def _parse_int(token: str, raw: str, idx: int, lineno: int) -> int:
    try:
        x = int(token)
    except ValueError:
        raise GraphFormatError(f"expected integer, got {token!r}", lineno, _column(raw, idx)) from None
    if x < 0:
        raise GraphFormatError(f"negative integer {x}", lineno, _column(raw, idx))
    return x


def _column(raw: str, field_idx: int) -> int:
    pos = 0
    for i, tok in enumerate(raw.split()):
        pos = raw.index(tok, pos)
        if i == field_idx:
            return pos + 1
        pos += len(tok)
    return 1


def load_graph(path) -> Graph:
    return parse_graph(Path(path).read_text())


def format_graph(g: Graph) -> str:
    edges = g.edges()
    lines = [f"{g.n} {len(edges)}"]
    lines.extend(f"{u} {v} {w!r}" for u, v, w in edges)
    return "\n".join(lines) + "\n"


def save_graph(g: Graph, path) -> None:
    Path(path).write_text(format_graph(g))


@dataclass
class GeneratorParams:
    n: int = 0
    m: int = 0
    rows: int = 0
    cols: int = 0
    weight_range: tuple[float, float] = (1.0, 100.0)
    max_tries: int = 1000


def generate_graph(model: str, params: GeneratorParams, seed: int = 0) -> Graph:
    """Deterministic random or structured graphs: ``gnm``, ``grid`` or ``path``."""
    lo, hi = params.weight_range
    if not 0 < lo <= hi:
        raise InfeasibleParametersError(f"bad weight range {params.weight_range}")
    rng = np.random.default_rng(seed)

    def draw(size):
        if lo == hi:
            return np.full(size, float(lo))
        return rng.uniform(lo, hi, size)

    if model == "path":
        n = params.n
        if n < 1:
            raise InfeasibleParametersError("path needs n >= 1")
        w = draw(n - 1)
        return Graph.from_edges(n, [(i, i + 1, w[i]) for i in range(n - 1)])
    if model == "grid":
        r, c = params.rows, params.cols
        if r < 1 or c < 1:
            raise InfeasibleParametersError("grid needs rows, cols >= 1")
        pairs = []
        for i in range(r):
            for j in range(c):
                x = i * c + j
                if j + 1 < c:
                    pairs.append((x, x + 1))
                if i + 1 < r:
                    pairs.append((x, x + c))
        w = draw(len(pairs))
        return Graph.from_edges(r * c, [(a, b, w[t]) for t, (a, b) in enumerate(pairs)])
    if model == "gnm":
        n, m = params.n, params.m
        total = n * (n - 1) // 2
        if n < 1 or m < n - 1 or m > total:
            raise InfeasibleParametersError(f"gnm needs n-1 <= m <= n(n-1)/2, got n={n}, m={m}")
        for _ in range(params.max_tries):
            idx = np.sort(rng.choice(total, size=m, replace=False))
            us, vs = _unrank_pairs(idx, n)
            w = draw(m)
            g = Graph.from_edges(n, zip(us.tolist(), vs.tolist(), w.tolist()), check_connected=False)
            if g.is_connected():
                return g
        raise InfeasibleParametersError(f"no connected gnm graph after {params.max_tries} tries")
    raise InfeasibleParametersError(f"unknown model {model!r}")


def _unrank_pairs(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # pair (u, v), u < v, ranked row-major over the upper triangle
    row_start = np.array([u * n - u * (u + 1) // 2 for u in range(n)], dtype=np.int64)
    us = np.searchsorted(row_start, idx, side="right") - 1
    vs = idx - row_start[us] + us + 1
    return us, vs


def dijkstra_from(g: Graph, s: int) -> list[float]:
    if not 0 <= s < g.n:
        raise IndexError(f"source {s} out of range")
    dist = [math.inf] * g.n
    dist[s] = 0.0
    heap = [(0.0, s)]
    adj = g.adjacency
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def multi_source_dijkstra(g: Graph, sources: Sequence[int]) -> tuple[list[float], list[int]]:
    """Distance to the nearest source and that source, ties to the smallest id.

    Labels are ordered lexicographically by ``(distance, source id)``, which is
    monotone under edge relaxation, so one Dijkstra run settles both.
    """
    dist = [math.inf] * g.n
    wit = [-1] * g.n
    heap = []
    for s in sorted(sources):
        if wit[s] == -1:
            dist[s] = 0.0
            wit[s] = s
            heap.append((0.0, s, s))
    heapq.heapify(heap)
    adj = g.adjacency
    while heap:
        d, p, u = heapq.heappop(heap)
        if d > dist[u] or (d == dist[u] and p > wit[u]):
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v] or (nd == dist[v] and p < wit[v]):
                dist[v] = nd
                wit[v] = p
                heapq.heappush(heap, (nd, p, v))
    return dist, wit


@dataclass(frozen=True, eq=False)
class ExactDistances:
    matrix: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, u: int, v: int) -> float:
        return float(self.matrix[u, v])


def build_exact_oracle(g: Graph, limit: int = EXACT_SIZE_LIMIT) -> ExactDistances:
    """All-pairs distances through scipy; independent of :func:`dijkstra_from`."""
    if g.n > limit:
        raise SizeGuardError(f"n={g.n} exceeds exact-oracle limit {limit}")
    mat = _scipy_dijkstra(g.to_csr(), directed=False)
    mat = np.minimum(mat, mat.T)
    mat.setflags(write=False)
    return ExactDistances(mat)
