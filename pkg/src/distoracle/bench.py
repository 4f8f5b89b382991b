"""Benchmark harness: build oracles, sample pairs, check stretch ceilings, count probes."""
from __future__ import annotations

import csv
import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import archive
from .blackbox import make_blackbox
from .const_oracle import MIN_CONST_K, assemble_const_oracle
from .graph import GeneratorParams, Graph, build_exact_oracle, generate_graph, load_graph
from .logk_oracle import assemble_logk_oracle
from .tz_core import QueryTrace, TZOracle, compute_bunches, compute_pivots, sample_levels

REL_TOL = 1e-9


@dataclass
class BenchConfig:
    graph: str
    engine: str
    k: int
    seed: int
    eps: float = 0.0
    blackbox: str = ""
    sample: int = 10000
    graph_seed: int = 0


@dataclass
class BenchRow:
    graph: str
    n: int
    m: int
    engine: str
    k: int
    eps: float
    blackbox: str
    seed: int
    pairs: int
    bound: float
    max_stretch: float
    mean_stretch: float
    p99_stretch: float
    max_probes: int
    mean_probes: float
    p99_probes: float
    build_seconds: float
    archive_bytes: int
    bunch_total: int
    violations: int
    status: str = "ok"


def parse_graph_spec(spec: str, seed: int = 0) -> Graph:
    """``gnm:n:m``, ``grid:rows:cols``, ``path:n`` (optionally ``:lo-hi`` weights) or a file path."""
    parts = spec.split(":")
    model = parts[0]
    if model not in ("gnm", "grid", "path"):
        return load_graph(spec)
    nums = parts[1:]
    weights = (1.0, 100.0)
    if nums and "-" in nums[-1]:
        lo, hi = nums.pop().split("-")
        weights = (float(lo), float(hi))
    ints = [int(x) for x in nums]
    if model == "gnm":
        params = GeneratorParams(n=ints[0], m=ints[1], weight_range=weights)
    elif model == "grid":
        params = GeneratorParams(rows=ints[0], cols=ints[1], weight_range=weights)
    else:
        params = GeneratorParams(n=ints[0], weight_range=weights)
    return generate_graph(model, params, seed)


def stretch_bound(engine: str, k: int, eps: float) -> float:
    if engine == "const":
        return (2 + eps) * k
    return 2 * k - 1


def sample_pairs(n: int, count: int, seed: int) -> list[tuple[int, int]]:
    if n * n <= count:
        return [(u, v) for u in range(n) for v in range(n)]
    rng = np.random.default_rng(seed)
    return [tuple(p) for p in rng.integers(0, n, size=(count, 2)).tolist()]


def build_engine(g: Graph, engine: str, k: int, seed: int, eps: float = 0.0,
                 blackbox: str = "rounded", exact=None):
    levels = sample_levels(g.n, k, seed)
    pivots = compute_pivots(g, levels)
    bunches = compute_bunches(g, levels, pivots)
    if engine == "tz":
        return TZOracle(g, levels, pivots, bunches)
    if engine == "logk":
        return assemble_logk_oracle(g, levels, pivots, bunches)
    if engine == "const":
        exact = exact if exact is not None else build_exact_oracle(g)
        bb = make_blackbox(blackbox, exact, k)
        return assemble_const_oracle(g, levels, pivots, bunches, eps, bb)
    raise ValueError(f"unknown engine {engine!r}")


def run_config(cfg: BenchConfig) -> BenchRow:
    g = parse_graph_spec(cfg.graph, cfg.graph_seed)
    exact = build_exact_oracle(g)
    bound = stretch_bound(cfg.engine, cfg.k, cfg.eps)
    base = dict(graph=cfg.graph, n=g.n, m=g.m, engine=cfg.engine, k=cfg.k, eps=cfg.eps,
                blackbox=cfg.blackbox, seed=cfg.seed, bound=bound)
    if cfg.engine == "const" and cfg.k < MIN_CONST_K:
        return BenchRow(**base, pairs=0, max_stretch=float("nan"), mean_stretch=float("nan"),
                        p99_stretch=float("nan"), max_probes=0, mean_probes=0.0, p99_probes=0.0,
                        build_seconds=0.0, archive_bytes=0, bunch_total=0, violations=0,
                        status="not-applicable")
    t0 = time.perf_counter()
    oracle = build_engine(g, cfg.engine, cfg.k, cfg.seed, cfg.eps, cfg.blackbox, exact)
    build_seconds = time.perf_counter() - t0
    size = len(archive.serialize(oracle, cfg.seed))

    stretches, probes = [], []
    violations = 0
    mat = exact.matrix
    for u, v in sample_pairs(g.n, cfg.sample, cfg.seed):
        tr = QueryTrace()
        est = oracle.query(u, v, tr)
        d = float(mat[u, v])
        probes.append(tr.probes + tr.steps)
        # zero-distance pairs only need the lower bound
        if est < d * (1 - REL_TOL) or (d > 0 and est > bound * d * (1 + REL_TOL)):
            violations += 1
        if d > 0:
            stretches.append(est / d)
    st = np.asarray(stretches) if stretches else np.ones(1)
    pr = np.asarray(probes)
    return BenchRow(**base, pairs=len(probes), max_stretch=float(st.max()), mean_stretch=float(st.mean()),
                    p99_stretch=float(np.percentile(st, 99)), max_probes=int(pr.max()),
                    mean_probes=float(pr.mean()), p99_probes=float(np.percentile(pr, 99)),
                    build_seconds=build_seconds, archive_bytes=size,
                    bunch_total=oracle.bunches.total_size(), violations=violations,
                    status="ok" if violations == 0 else "VIOLATION")


def expand_configs(graph: str, engines, ks, epss, blackboxes, seeds, sample: int,
                   graph_seed: int = 0) -> list[BenchConfig]:
    out = []
    for engine, k, seed in itertools.product(engines, ks, seeds):
        if engine == "const":
            for eps, bb in itertools.product(epss, blackboxes):
                out.append(BenchConfig(graph, engine, k, seed, eps, bb, sample, graph_seed))
        else:
            out.append(BenchConfig(graph, engine, k, seed, 0.0, "", sample, graph_seed))
    return out


def run_bench(configs: list[BenchConfig], jobs: int = 1) -> list[BenchRow]:
    if jobs <= 1:
        return [run_config(c) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_config, configs))


def write_csv(rows: list[BenchRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(asdict(rows[0]).keys()) if rows else [])
        writer.writeheader()
        for row in rows:
            writer.writerow(asdict(row))
