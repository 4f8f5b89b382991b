"""Binary oracle archives.

Layout (all little-endian; see docs/archive_format.md)::

    magic "DSTORACL" | u32 version | u8 engine | u32 k | f64 eps | u64 seed
    graph | levels | pivots | bunches | P lists | delta | plans
    [const only] comb | intervals | pointers | prefix argmax | black-box spec

The black box is stored by identity (e.g. ``rounded``) and rebuilt from the
embedded graph on load; every other table is stored verbatim.
"""
from __future__ import annotations

import io
import struct
from pathlib import Path

import numpy as np

from .blackbox import make_blackbox
from .comb import EpsComb
from .const_oracle import ConstOracle
from .graph import Graph, build_exact_oracle
from .logk_oracle import LogKOracle, PlanNode
from .tz_core import BunchSet, LevelHierarchy, PivotTable, TZOracle

MAGIC = b"DSTORACL"
VERSION = 1
ENGINES = ("tz", "logk", "const")


class ArchiveError(ValueError):
    pass


def engine_name(oracle) -> str:
    if isinstance(oracle, ConstOracle):
        return "const"
    if isinstance(oracle, LogKOracle):
        return "logk"
    if isinstance(oracle, TZOracle):
        return "tz"
    raise TypeError(f"not an oracle: {type(oracle).__name__}")


class _Writer:
    def __init__(self):
        self.buf = io.BytesIO()

    def pack(self, fmt: str, *vals) -> None:
        self.buf.write(struct.pack("<" + fmt, *vals))

    def array(self, arr, dtype: str) -> None:
        a = np.ascontiguousarray(arr, dtype=dtype)
        self.pack("Q", a.size)
        self.buf.write(a.tobytes())

    def string(self, s: str) -> None:
        raw = s.encode()
        self.pack("I", len(raw))
        self.buf.write(raw)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def unpack(self, fmt: str):
        size = struct.calcsize("<" + fmt)
        if self.pos + size > len(self.data):
            raise ArchiveError("truncated archive")
        vals = struct.unpack_from("<" + fmt, self.data, self.pos)
        self.pos += size
        return vals if len(vals) > 1 else vals[0]

    def array(self, dtype: str) -> np.ndarray:
        count = self.unpack("Q")
        dt = np.dtype(dtype)
        end = self.pos + count * dt.itemsize
        if end > len(self.data):
            raise ArchiveError("truncated archive")
        a = np.frombuffer(self.data, dtype=dt, count=count, offset=self.pos)
        self.pos = end
        return a.astype(dt.newbyteorder("="))

    def string(self) -> str:
        size = self.unpack("I")
        raw = self.data[self.pos:self.pos + size]
        if len(raw) != size:
            raise ArchiveError("truncated archive")
        self.pos += size
        return raw.decode()


def _ragged(w: _Writer, rows, dtype: str) -> None:
    w.array([len(r) for r in rows], "<u4")
    w.array([x for r in rows for x in r], dtype)


def _read_ragged(r: _Reader, dtype: str) -> list[list]:
    counts = r.array("<u4").tolist()
    flat = r.array(dtype).tolist()
    if sum(counts) != len(flat):
        raise ArchiveError("inconsistent ragged section")
    out, pos = [], 0
    for c in counts:
        out.append(flat[pos:pos + c])
        pos += c
    return out


def serialize(oracle, seed: int = 0) -> bytes:
    engine = engine_name(oracle)
    w = _Writer()
    w.buf.write(MAGIC)
    w.pack("I", VERSION)
    w.pack("B", ENGINES.index(engine))
    k = oracle.levels.k
    w.pack("I", k)
    w.pack("d", oracle.eps if engine == "const" else 0.0)
    w.pack("Q", seed)

    g = oracle.graph
    w.pack("I", g.n)
    w.array(g.offsets, "<u4")
    w.array(g.neighbors, "<u4")
    w.array(g.weights, "<f8")

    w.array(oracle.levels.level, "<u4")
    w.array(oracle.pivots.pivot, "<u4")
    w.array(oracle.pivots.dist[:k], "<f8")

    items = [sorted(m.items()) for m in oracle.bunches.maps]
    _ragged(w, [[x for x, _ in it] for it in items], "<u4")
    _ragged(w, [[d for _, d in it] for it in items], "<f8")
    _ragged(w, oracle.bunches.sorted_dists, "<f8")

    delta = getattr(oracle, "delta", None)
    if delta is None:
        w.pack("II", 0, 0)
    else:
        w.pack("II", *delta.shape)
        w.array(delta, "<f8")

    plans = getattr(oracle, "plans", None) or []
    w.pack("B", 1 if plans else 0)
    if plans:
        _ragged(w, [[f for nd in plan for f in (nd.i1, nd.i2, nd.i, nd.j, nd.fail, nd.hold)]
                    for plan in plans], "<i4")

    if engine == "const":
        comb = oracle.comb
        w.pack("ddI", comb.eps, comb.alpha, comb.imax)
        w.array(comb.values, "<f8")
        heads = sorted(comb.head_index.items())
        w.array([d for d, _ in heads], "<f8")
        w.array([i for _, i in heads], "<u4")
        _ragged(w, oracle.intervals, "<f8")
        ptrs = [sorted(p.items()) for p in oracle.pointers]
        _ragged(w, [[c for c, _ in p] for p in ptrs], "<u4")
        _ragged(w, [[i for _, i in p] for p in ptrs], "<u4")
        w.array(oracle.prefix, "<i4")
        w.string(oracle.blackbox.spec())
    return w.buf.getvalue()


def deserialize(data: bytes):
    """Rebuild an oracle; returns ``(oracle, seed)``."""
    if data[:len(MAGIC)] != MAGIC:
        raise ArchiveError("bad magic tag")
    r = _Reader(data)
    r.pos = len(MAGIC)
    version = r.unpack("I")
    if version != VERSION:
        raise ArchiveError(f"unsupported archive version {version}")
    code = r.unpack("B")
    if code >= len(ENGINES):
        raise ArchiveError(f"unknown engine code {code}")
    engine = ENGINES[code]
    k = r.unpack("I")
    eps = r.unpack("d")
    seed = r.unpack("Q")

    n = r.unpack("I")
    offsets = r.array("<u4").astype(np.int64)
    neighbors = r.array("<u4").astype(np.int64)
    weights = r.array("<f8")
    if len(offsets) != n + 1 or offsets[-1] != len(neighbors) or len(weights) != len(neighbors):
        raise ArchiveError("inconsistent graph section")
    g = Graph(n, offsets, neighbors, weights)

    levels = LevelHierarchy(k, r.array("<u4").astype(np.int64))
    pivot = r.array("<u4").astype(np.int64).reshape(k, n)
    dist = np.full((k + 1, n), np.inf)
    dist[:k] = r.array("<f8").reshape(k, n)
    pivots = PivotTable(pivot, dist)

    ids = _read_ragged(r, "<u4")
    dists = _read_ragged(r, "<f8")
    sorted_dists = _read_ragged(r, "<f8")
    if not (len(ids) == len(dists) == len(sorted_dists) == n):
        raise ArchiveError("inconsistent bunch section")
    bunches = BunchSet([dict(zip(a, b)) for a, b in zip(ids, dists)], sorted_dists)

    rows, cols = r.unpack("II")
    delta = r.array("<f8").reshape(rows, cols) if rows else None
    plans: list[list[PlanNode]] = []
    if r.unpack("B"):
        for flat in _read_ragged(r, "<i4"):
            plans.append([PlanNode(*flat[t:t + 6]) for t in range(0, len(flat), 6)])

    if engine == "tz":
        return TZOracle(g, levels, pivots, bunches), seed
    if engine == "logk":
        return LogKOracle(g, levels, pivots, bunches, delta, plans), seed

    c_eps, c_alpha, imax = r.unpack("ddI")
    values = r.array("<f8").tolist()
    keys = r.array("<f8").tolist()
    idx = r.array("<u4").tolist()
    comb = EpsComb(c_eps, c_alpha, imax, values, dict(zip(keys, idx)))
    intervals = _read_ragged(r, "<f8")
    pc = _read_ragged(r, "<u4")
    pi = _read_ragged(r, "<u4")
    pointers = [dict(zip(a, b)) for a, b in zip(pc, pi)]
    prefix = r.array("<i4").astype(np.int64).reshape(n, k)
    spec = r.string()
    bb = make_blackbox(spec, build_exact_oracle(g), k)
    if sorted(bb.distance_set()) != keys:
        raise ArchiveError("black box rebuilt from archive does not match stored head map")
    return ConstOracle(g, levels, pivots, bunches, delta, comb, intervals, pointers, prefix, bb, eps), seed


def save(oracle, path, seed: int = 0) -> int:
    data = serialize(oracle, seed)
    Path(path).write_bytes(data)
    return len(data)


def load(path):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ArchiveError(str(exc)) from exc
    return deserialize(data)
