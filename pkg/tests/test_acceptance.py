"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""
import math
import sys
from collections import Counter

import numpy as np
import pytest

from distoracle import archive
from distoracle.bench import build_engine, sample_pairs
from distoracle.blackbox import make_blackbox
from distoracle.comb import build_eps_comb, clamp_eps, comb_epsilon, tau_lookup
from distoracle.const_oracle import assemble_const_oracle
from distoracle.graph import build_exact_oracle
from distoracle.logk_oracle import (CanonicalArgmaxTree, assemble_logk_oracle, range_argmax,
                                    range_argmax_naive)
from distoracle.tz_core import QueryTrace, naive_bunches

from conftest import audit_descent, gnm, same_bunches, structures
from test_comb import chain_violations, comb_violations

TOL = 1e-9
SEEDS = range(5)


@pytest.fixture
def report(capsys):
    def emit(tag: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {tag}: {detail}")
        assert ok, detail
    return emit


def within(est: float, d: float, bound: float) -> bool:
    return d * (1 - TOL) <= est <= bound * d * (1 + TOL)


def criterion_graph(seed: int, n: int = 256, m: int = 2048):
    g = gnm(n, m, seed, weights=(1.0, 100.0))
    return g, build_exact_oracle(g)


def test_c1_classic_stretch(report):
    bad, worst, count = 0, 0.0, 0
    for seed in SEEDS:
        g, exact = criterion_graph(seed)
        for k in (2, 3, 5, 8):
            o = build_engine(g, "tz", k, seed)
            for u in range(g.n):
                row = exact.matrix[u]
                for v in range(g.n):
                    est, d = o.query(u, v), row[v]
                    count += 1
                    if not within(est, d, 2 * k - 1):
                        bad += 1
                    elif d > 0:
                        worst = max(worst, est / d / (2 * k - 1))
    report("C1 classic query stretch <= 2k-1", bad == 0,
           f"{count} pairs over k in {{2,3,5,8}} x 5 seeds, violations={bad}, max stretch/(2k-1)={worst:.3f}")


def test_c2_binary_search_stretch_and_audit(report):
    bad, audit_bad, count, nodes = 0, 0, 0, 0
    for seed in SEEDS:
        g, exact = criterion_graph(seed)
        for k in (16, 32):
            o = build_engine(g, "logk", k, seed)
            for u, v in sample_pairs(g.n, 10_000, seed + k):
                tr = QueryTrace()
                est = o.query(u, v, tr)
                count += 1
                if not within(est, exact(u, v), 2 * k - 1):
                    bad += 1
                nodes += len(tr.of_kind("plan")) + 1
                audit_bad += len(audit_descent(u, v, tr, o, exact))
    report("C2 binary-search stretch <= 2k-1 and feasibility audit", bad == 0 and audit_bad == 0,
           f"{count} pairs, k in {{16,32}} x 5 seeds, violations={bad}, audited nodes={nodes}, audit failures={audit_bad}")


def test_c3_probe_count_independent_of_n(report):
    k = 32
    ceiling = 6 * math.ceil(math.log2(k)) + 16
    maxima = {}
    for n in (128, 256, 512):
        top = 0
        for gs in range(3):
            g = gnm(n, 8 * n, 100 + gs)
            o = build_engine(g, "logk", k, gs)
            for u, v in sample_pairs(n, 20_000, gs):
                tr = QueryTrace()
                o.query(u, v, tr)
                top = max(top, tr.probes)
        maxima[n] = top
    ok = len(set(maxima.values())) == 1 and max(maxima.values()) <= ceiling
    report("C3 logk probe maxima identical across n and <= 46", ok, f"k=32 max probes by n: {maxima}, ceiling={ceiling}")


CONST_GRID = [(k, eps, spec) for k in (4, 6, 8) for eps in (0.5, 1.0) for spec in ("rounded", "inflated:64k")]


def test_c4_constant_oracle_stretch(report):
    bad, fallback_bad, count = 0, 0, 0
    fallbacks = Counter()
    worst = 0.0
    for seed in range(2):
        g, exact = criterion_graph(seed)
        for k, eps, spec in CONST_GRID:
            levels, pivots, bunches = structures(g, k, seed)
            o = assemble_const_oracle(g, levels, pivots, bunches, eps, make_blackbox(spec, exact, k))
            for u, v in sample_pairs(g.n, 10_000, seed + 7 * k):
                tr = QueryTrace()
                est = o.query(u, v, tr)
                d = exact(u, v)
                count += 1
                if not within(est, d, (2 + eps) * k):
                    bad += 1
                elif d > 0:
                    worst = max(worst, est / d / ((2 + eps) * k))
                for ev in tr.of_kind("fallback"):
                    fallbacks[spec] += 1
                    if not within(ev["estimate"], d, (1 + eps / 2) * k):
                        fallback_bad += 1
    ok = bad == 0 and fallback_bad == 0 and fallbacks["inflated:64k"] > 0
    report("C4 constant-time stretch <= (2+eps)k with window fallback exercised", ok,
           f"{count} pairs over k x eps x black box x 2 seeds, violations={bad}, max stretch/bound={worst:.3f}, "
           f"fallbacks={dict(fallbacks)}, fallback bound failures={fallback_bad}")


def const_ceiling(o) -> int:
    # window scan + loop steps + 4 probes per loop test + 4 closing probes
    return o.window + o.loop_cap + 4 * o.loop_cap + 4


def test_c5_constant_oracle_operation_count(report):
    # maxima are grouped by (eps, alpha_bb); every k in the grid shares alpha_bb per black box
    rows, ok = [], True
    pooled: dict[tuple, dict[int, int]] = {}
    for k, eps, spec in CONST_GRID:
        maxima, ceil_ = {}, None
        for n in (128, 256, 512):
            top = 0
            for gs in range(3):
                g = gnm(n, 8 * n, 100 + gs)
                exact = build_exact_oracle(g)
                o = assemble_const_oracle(g, *structures(g, k, gs), eps, make_blackbox(spec, exact, k))
                ceil_ = const_ceiling(o)
                for u, v in sample_pairs(n, 5000, gs):
                    tr = QueryTrace()
                    o.query(u, v, tr)
                    top = max(top, tr.probes + tr.steps)
            maxima[n] = top
            key = (eps, o.alpha_bb)
            pooled.setdefault(key, {})
            pooled[key][n] = max(pooled[key].get(n, 0), top)
        ok &= max(maxima.values()) <= ceil_
        rows.append(f"k={k} eps={eps} {spec}: {maxima} (ceiling {ceil_})")
    for key, by_n in pooled.items():
        ok &= len(set(by_n.values())) == 1
    summary = "; ".join(f"eps={e} alpha_bb={a:g}: {by_n}" for (e, a), by_n in pooled.items())
    report("C5 constant-time probes+steps bounded and identical across n per (eps, alpha_bb)", ok,
           f"{summary} | per k: " + "; ".join(rows))


def test_c6_equivalence_suites(report):
    issues = []
    for seed in range(10):
        n = 64 + 6 * seed
        g = gnm(n, 4 * n, seed)
        exact = build_exact_oracle(g)
        for k in (2, 3, 4, 5, 6):
            levels, pivots, bunches = structures(g, k, seed)
            if not same_bunches(bunches, naive_bunches(g, levels, pivots, exact)):
                issues.append(f"bunches n={n} k={k} seed={seed}")

    rng = np.random.default_rng(0)
    k = 32
    delta = rng.random((50, k - 2))
    tree = CanonicalArgmaxTree(delta, k)
    evens = np.arange(0, k - 1, 2)
    for _ in range(10_000):
        u = int(rng.integers(50))
        lo, hi = sorted(rng.choice(evens, size=2, replace=False).tolist())
        if range_argmax(u, lo, hi, tree, delta) != range_argmax_naive(delta[u], lo, hi):
            issues.append(f"range_argmax u={u} {lo}..{hi}")

    g, exact = criterion_graph(0, n=128, m=1024)
    for k in (16, 32):
        o = assemble_logk_oracle(g, *structures(g, k, 1))
        for u, plan in enumerate(o.plans):
            for nd in plan:
                if not nd.is_leaf and nd.j != range_argmax_naive(o.delta[u], nd.i1, nd.i):
                    issues.append(f"plan j u={u} node={nd}")
    for k in (4, 7, 8):
        o = build_engine(g, "const", k, 2, 1.0, "rounded", exact)
        for u in range(g.n):
            for i in range(2, k, 2):
                if o.prefix[u, i] != range_argmax_naive(o.delta[u], 0, i):
                    issues.append(f"prefix u={u} i={i}")

    s = sorted(set(rng.uniform(1, 1000, 500).tolist()))
    for x in rng.uniform(s[0], 1200, 10_000):
        if tau_lookup(s, x) != max(t for t in s if t <= x):
            issues.append(f"tau {x}")
    report("C6 equivalence suites (bunches, range argmax, plans, prefix table, tau)", not issues,
           f"{len(issues)} mismatches" + (f", first: {issues[0]}" if issues else ""))


def test_c7_comb_properties(report):
    rng = np.random.default_rng(7)
    eps_list = [0.1, 0.5, clamp_eps(1.0)]
    issues, checked_heads = [], 0
    for t in range(1000):
        size = int(rng.integers(1, 501))
        vals = sorted(10.0 ** rng.uniform(0.0, 6.0, size))
        eps = eps_list[t % 3]
        comb = comb_epsilon(vals, eps)
        issues += comb_violations(vals, comb, eps)
        alpha = (1.0, 2.0, 128.0)[t % 3]
        c = build_eps_comb(vals, eps, alpha)
        checked_heads += len(c.head_index)
        issues += chain_violations(c, eps, rtol=1e-9)
    report("C7 comb covering/spacing/cardinality exact and chain property (rtol 1e-9)", not issues,
           f"1000 sets, eps in {{0.1, 0.5, 1->0.5}}, heads checked={checked_heads}, problems={len(issues)}"
           + (f", first: {issues[0]}" if issues else ""))


def test_c8_space_scaling(report):
    n = 1024
    rows, ok = [], True
    for k in range(2, 9):
        totals = []
        for seed in range(20):
            g = gnm(n, 8 * n, seed)
            totals.append(structures(g, k, seed)[2].total_size())
        bound = 4 * k * n ** (1 + 1 / k)
        mean = float(np.mean(totals))
        ok &= mean <= bound
        rows.append(f"k={k}: mean {mean:.0f} / bound {bound:.0f} = {mean / bound:.3f}")
    report("C8 mean total bunch size <= 4 k n^(1+1/k) at n=1024", ok, "; ".join(rows))


def test_c9_determinism_and_persistence(report, tmp_path):
    issues = []
    g, exact = criterion_graph(3, n=128, m=1024)
    configs = [("tz", 3, 0.0, "rounded"), ("logk", 16, 0.0, "rounded"), ("const", 6, 1.0, "rounded"),
               ("const", 4, 0.5, "inflated:64k")]
    for engine, k, eps, spec in configs:
        first = archive.serialize(build_engine(g, engine, k, 11, eps, spec, exact), 11)
        second = archive.serialize(build_engine(gnm(128, 1024, 3), engine, k, 11, eps, spec), 11)
        if first != second:
            issues.append(f"{engine} k={k}: archives differ")
        path = tmp_path / f"{engine}{k}.arc"
        path.write_bytes(first)
        loaded, seed = archive.load(path)
        original = build_engine(g, engine, k, 11, eps, spec, exact)
        diff = sum(loaded.query(u, v) != original.query(u, v) for u in range(g.n) for v in range(g.n))
        if diff or seed != 11:
            issues.append(f"{engine} k={k}: {diff} answers changed after round trip")
    report("C9 byte-identical archives and exact round-trip answers", not issues,
           f"{len(configs)} engine configs, all {g.n * g.n} pairs each" + (f"; {issues}" if issues else ""))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
