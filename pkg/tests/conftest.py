"""Shared fixtures and independent oracles for the test suite."""

import numpy as np
import pytest

from hetnetgen.graph import HetGraph, TypeSchema
from hetnetgen.rng import make_rng


# ---------------------------------------------------------------------------
# Graph fixtures
# ---------------------------------------------------------------------------


def two_type_schema():
    return TypeSchema(("A", "P"), ("write",), {(0, 0): 0, (0, 1): 0, (1, 1): 0})


@pytest.fixture
def single_edge_graph():
    """(0:A) - (1:P)"""
    return HetGraph([0, 1], [(0, 1, 0)], two_type_schema())


@pytest.fixture
def star_graph():
    """Center 0 with 4 leaves, all one type."""
    schema = TypeSchema(("A",), ("a",), {(0, 0): 0})
    return HetGraph([0] * 5, [(0, i, 0) for i in range(1, 5)], schema)


def random_typed_graph(n_nodes, edge_prob, n_types, rng):
    """Random simple graph with random types; single edge label."""
    schema = TypeSchema(
        tuple(chr(ord("A") + i) for i in range(n_types)), ("e",),
        {(i, j): 0 for i in range(n_types) for j in range(n_types)},
    )
    types = rng.integers(n_types, size=n_nodes)
    edges = [
        (u, v, 0)
        for u in range(n_nodes)
        for v in range(u + 1, n_nodes)
        if rng.random() < edge_prob
    ]
    return HetGraph(types, edges, schema)


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------


def brute_triangles(graph: HetGraph) -> int:
    """Enumerate every node triple."""
    pairs = graph.edge_pair_set()
    n = graph.n_nodes
    count = 0
    for a in range(n):
        for b in range(a + 1, n):
            if (a, b) not in pairs:
                continue
            for c in range(b + 1, n):
                if (a, c) in pairs and (b, c) in pairs:
                    count += 1
    return count


def brute_clustering(graph: HetGraph) -> float:
    """Per-node closed-pair enumeration, averaged over all nodes."""
    pairs = graph.edge_pair_set()
    adj = {u: set() for u in range(graph.n_nodes)}
    for u, v in pairs:
        adj[u].add(v)
        adj[v].add(u)
    total = 0.0
    for u in range(graph.n_nodes):
        nbrs = sorted(adj[u])
        if len(nbrs) < 2:
            continue
        closed = sum(
            1
            for i in range(len(nbrs))
            for j in range(i + 1, len(nbrs))
            if (min(nbrs[i], nbrs[j]), max(nbrs[i], nbrs[j])) in pairs
        )
        total += closed / (len(nbrs) * (len(nbrs) - 1) / 2)
    return total / graph.n_nodes if graph.n_nodes else 0.0


def brute_lcc(graph: HetGraph) -> int:
    """Recursive-style component sweep over the pair set."""
    adj = {u: set() for u in range(graph.n_nodes)}
    for u, v in graph.edge_pair_set():
        adj[u].add(v)
        adj[v].add(u)
    unseen = set(range(graph.n_nodes))
    best = 0
    while unseen:
        frontier = {unseen.pop()}
        size = 0
        while frontier:
            u = frontier.pop()
            size += 1
            nxt = adj[u] & unseen
            unseen -= nxt
            frontier |= nxt
        best = max(best, size)
    return best


def brute_assortativity(graph: HetGraph) -> float:
    """Textbook Pearson correlation over both edge orientations."""
    deg = {u: 0 for u in range(graph.n_nodes)}
    for u, v in graph.edge_pair_set():
        deg[u] += 1
        deg[v] += 1
    xs, ys = [], []
    for u, v in graph.edge_pair_set():
        xs += [deg[u], deg[v]]
        ys += [deg[v], deg[u]]
    x, y = np.array(xs, float), np.array(ys, float)
    sx, sy = x.std(), y.std()
    if sx == 0 or sy == 0:
        return float("nan")
    return float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * sy))


def fd_gradient(fn, arrays, eps=1e-5):
    """Central finite differences of scalar fn(arrays) w.r.t. every entry."""
    grads = [np.zeros_like(a) for a in arrays]
    for ai, a in enumerate(arrays):
        it = np.nditer(a, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            old = a[idx]
            a[idx] = old + eps
            up = fn()
            a[idx] = old - eps
            down = fn()
            a[idx] = old
            grads[ai][idx] = (up - down) / (2 * eps)
    return grads


def max_rel_err(analytic, numeric, floor=1e-7):
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.abs(a) + np.abs(n), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


@pytest.fixture
def rng():
    return make_rng(12345)
