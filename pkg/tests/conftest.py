import pytest

from distoracle.graph import GeneratorParams, Graph, build_exact_oracle, generate_graph
from distoracle.tz_core import compute_bunches, compute_pivots, sample_levels


def gnm(n: int, m: int, seed: int = 0, weights=(1.0, 100.0)) -> Graph:
    return generate_graph("gnm", GeneratorParams(n=n, m=m, weight_range=weights), seed)


def structures(g: Graph, k: int, seed: int = 0):
    levels = sample_levels(g.n, k, seed)
    pivots = compute_pivots(g, levels)
    return levels, pivots, compute_bunches(g, levels, pivots)


@pytest.fixture(scope="session")
def p3():
    return Graph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)])


@pytest.fixture(scope="session")
def small_gnm():
    g = gnm(64, 256, seed=3)
    return g, build_exact_oracle(g)


def same_bunches(a, b, rtol: float = 1e-12) -> bool:
    """Identical member sets; distances may differ in the last ulp (summation order)."""
    if len(a.maps) != len(b.maps):
        return False
    for x, y in zip(a.maps, b.maps):
        if x.keys() != y.keys():
            return False
        if any(abs(x[w] - y[w]) > rtol * max(1.0, abs(y[w])) for w in x):
            return False
    return True


def is_terminal(j: int, u: int, v: int, k: int, pivots, bunches) -> bool:
    if j == k - 1:
        return True
    if j % 2:
        return False
    return (int(pivots.pivot[j, u]) in bunches.maps[v]
            or int(pivots.pivot[j + 1, v]) in bunches.maps[u])


def audit_descent(u: int, v: int, trace, oracle, exact) -> list[str]:
    """Check every visited plan node against the feasibility definition and the
    failed-branch inequality delta_j(u) <= 2 d(u, v); returns the problems found."""
    k, pivots, bunches = oracle.k, oracle.pivots, oracle.bunches
    d = exact(u, v)
    problems = []
    nodes = trace.of_kind("plan") + trace.of_kind("leaf")
    for node in nodes:
        i1, i2 = node["i1"], node["i2"]
        if i1 % 2:
            problems.append(f"odd i1 at {node}")
        if pivots.dist[i1, u] > i1 * d * (1 + 1e-9) + 1e-12:
            problems.append(f"dA(u,i1) too large at {node}")
        if not is_terminal(i2, u, v, k, pivots, bunches):
            problems.append(f"i2 not terminal at {node}")
        if node.get("failed") and oracle.delta[u, node["j"]] > 2 * d * (1 + 1e-9) + 1e-12:
            problems.append(f"delta_j > 2d on failed branch at {node}")
    return problems
