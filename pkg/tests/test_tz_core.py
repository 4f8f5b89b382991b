import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from distoracle.graph import GeneratorParams, build_exact_oracle, generate_graph
from distoracle.tz_core import (LevelHierarchy, QueryTrace, TZOracle, build_tz_oracle, compute_bunches,
                                compute_pivots, dist_k, naive_bunches, sample_levels)

from conftest import gnm, same_bunches, structures


@pytest.fixture
def p3_structs(p3):
    # A_1 = {2}
    levels = LevelHierarchy(2, np.array([0, 0, 1]))
    pivots = compute_pivots(p3, levels)
    return levels, pivots, compute_bunches(p3, levels, pivots)


def test_p3_pivots(p3_structs):
    _, pivots, _ = p3_structs
    assert pivots.pivot[1].tolist() == [2, 2, 2]
    assert pivots.dist[1].tolist() == [2.0, 1.0, 0.0]
    assert pivots.pivot[0].tolist() == [0, 1, 2]
    assert pivots.dist[0].tolist() == [0.0, 0.0, 0.0]


def test_p3_bunches(p3, p3_structs):
    levels, pivots, bunches = p3_structs
    assert bunches.maps == [{0: 0.0, 1: 1.0, 2: 2.0}, {1: 0.0, 2: 1.0}, {2: 0.0}]
    assert bunches.sorted_dists == [[0.0, 1.0, 2.0], [0.0, 1.0], [0.0]]
    naive = naive_bunches(p3, levels, pivots, build_exact_oracle(p3))
    assert naive.maps == bunches.maps


def test_p3_dist_k(p3_structs):
    _, pivots, bunches = p3_structs
    tr = QueryTrace()
    assert dist_k(0, 1, 0, bunches, pivots, tr) == 3.0
    assert [e["w"] for e in tr.of_kind("dist_k")] == [0, 2]
    assert dist_k(1, 0, 0, bunches, pivots) == 1.0
    for u in range(3):
        assert dist_k(u, u, 0, bunches, pivots) == 0.0


def test_single_vertex_levels():
    g = generate_graph("path", GeneratorParams(n=1))
    for k in (2, 3, 5):
        levels = sample_levels(1, k, seed=11)
        assert levels.sizes() == [1] * k
        pivots = compute_pivots(g, levels)
        bunches = compute_bunches(g, levels, pivots)
        assert bunches.maps == [{0: 0.0}]


def test_full_top_level_collapses_bunches(small_gnm):
    g, exact = small_gnm
    levels = LevelHierarchy(2, np.ones(g.n, dtype=np.int64))
    pivots = compute_pivots(g, levels)
    bunches = compute_bunches(g, levels, pivots)
    for u in range(g.n):
        assert bunches.maps[u].keys() == set(range(g.n))
        assert np.allclose([bunches.maps[u][w] for w in range(g.n)], exact.matrix[u], rtol=1e-12)


def test_sample_levels_deterministic_and_nested():
    a, b = sample_levels(500, 4, seed=9), sample_levels(500, 4, seed=9)
    assert np.array_equal(a.level, b.level)
    sizes = a.sizes()
    assert sizes[0] == 500 and all(x >= y for x, y in zip(sizes, sizes[1:])) and sizes[-1] > 0
    assert set(a.members(2)) <= set(a.members(1))


def test_sample_levels_mean_first_level():
    n, k = 1000, 4
    sizes = [sample_levels(n, k, seed=s).sizes()[1] for s in range(100)]
    expected = n * n ** (-1 / k)
    assert 0.5 * expected <= np.mean(sizes) <= 1.5 * expected


def test_sample_levels_rejects_bad_args():
    with pytest.raises(ValueError):
        sample_levels(10, 1)
    with pytest.raises(ValueError):
        sample_levels(0, 3)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_pivots_are_nearest_members(small_gnm, k):
    g, exact = small_gnm
    levels, pivots, _ = structures(g, k, seed=k)
    assert pivots.pivot[0].tolist() == list(range(g.n))
    for i in range(1, k):
        members = levels.members(i)
        sub = exact.matrix[:, members]
        assert np.allclose(pivots.dist[i], sub.min(axis=1))
        assert all(levels.level[p] >= i for p in pivots.pivot[i])
        assert np.allclose(pivots.dist[i], exact.matrix[np.arange(g.n), pivots.pivot[i]])
    assert np.all(np.diff(pivots.dist[:k], axis=0) >= 0)


@pytest.mark.parametrize("k, seed", [(3, 0), (3, 1), (5, 2), (6, 3)])
def test_bunches_match_definition(small_gnm, k, seed):
    g, exact = small_gnm
    levels, pivots, bunches = structures(g, k, seed)
    assert same_bunches(bunches, naive_bunches(g, levels, pivots, exact))
    top = set(levels.members(k - 1))
    for u in range(g.n):
        assert top <= bunches.maps[u].keys()
        assert bunches.maps[u][u] == 0.0


def test_bunches_with_zero_weight_edges():
    from distoracle.graph import Graph
    g = Graph.from_edges(5, [(0, 1, 0.0), (1, 2, 1.0), (2, 3, 0.0), (3, 4, 2.0)])
    exact = build_exact_oracle(g)
    for seed in range(20):
        levels, pivots, bunches = structures(g, 3, seed)
        assert same_bunches(bunches, naive_bunches(g, levels, pivots, exact))


@pytest.mark.parametrize("k", [2, 3, 5])
def test_pivot_exclusion_and_stretch(small_gnm, k):
    g, exact = small_gnm
    levels, pivots, bunches = structures(g, k, seed=k + 10)
    for u in range(g.n):
        bu = bunches.maps[u]
        for v in range(g.n):
            d = exact(u, v)
            for i in range(k - 1):
                w = int(pivots.pivot[i, v])
                if u != v and w not in bu:
                    assert pivots.dist[i + 1, u] <= exact(u, w) + 1e-9
            tr = QueryTrace()
            est = dist_k(u, v, 0, bunches, pivots, tr)
            assert d * (1 - 1e-9) <= est <= (2 * k - 1) * d * (1 + 1e-9)
            steps = tr.of_kind("dist_k")
            assert len(steps) <= k
            for a, b in zip(steps, steps[1:]):
                assert b["du"] <= a["du"] + d + 1e-9


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 40), k=st.integers(2, 6), gseed=st.integers(0, 10**6), seed=st.integers(0, 10**6))
def test_stretch_property(n, k, gseed, seed):
    m = min(n * (n - 1) // 2, 3 * n)
    g = gnm(n, m, gseed, weights=(1.0, 5.0))
    exact = build_exact_oracle(g)
    oracle = build_tz_oracle(g, k, seed)
    assert same_bunches(oracle.bunches, naive_bunches(g, oracle.levels, oracle.pivots, exact))
    for u in range(n):
        for v in range(n):
            d = exact(u, v)
            est = oracle.query(u, v)
            assert d * (1 - 1e-9) <= est <= (2 * k - 1) * d * (1 + 1e-9)


def test_oracle_wrapper(small_gnm):
    g, _ = small_gnm
    o = build_tz_oracle(g, 3, seed=4)
    assert isinstance(o, TZOracle) and o.k == 3
    assert o.query(5, 5) == 0.0
    assert math.isfinite(o.query(0, g.n - 1))
