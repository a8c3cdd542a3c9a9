"""Structural graph statistics, novelty/uniqueness scores, and pattern
distribution comparisons.

Conventions, recorded because the literature is not unanimous:

* clustering_coef averages local coefficients over all nodes; nodes with
  degree < 2 contribute 0 and stay in the denominator.
* powerlaw_coef is the continuous maximum-likelihood exponent with
  d_min = 1 and no cutoff search; a graph whose every degree equals
  d_min yields the +inf sentinel.
* degree_mmd is the squared maximum mean discrepancy between normalized
  degree histograms under the kernel exp(-tv(h1, h2)^2 / sigma^2) with
  sigma = 1 and total variation as the ground distance.
* uniqueness is a normalized edge symmetric-difference ("edge-edit")
  proxy for graph edit distance, in percent.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError
from .graph import HetGraph
from .walks import MetaPathPattern, extract_pattern, sample_walk


# ---------------------------------------------------------------------------
# Structural statistics
# ---------------------------------------------------------------------------


def lcc(graph: HetGraph) -> int:
    """Node count of the largest connected component (0 for an empty graph)."""
    n = graph.n_nodes
    if n == 0:
        return 0
    adj = graph.adjacency()
    seen = np.zeros(n, dtype=bool)
    best = 0
    for s in range(n):
        if seen[s]:
            continue
        size = 0
        stack = [s]
        seen[s] = True
        while stack:
            u = stack.pop()
            size += 1
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        best = max(best, size)
    return best


def triangle_count(graph: HetGraph) -> int:
    """Number of unordered node triples forming three mutual edges."""
    neighbor_sets = [set(map(int, a)) for a in graph.adjacency()]
    total = 0
    for u, v, _ in graph.edges:  # canonical u < v
        common = neighbor_sets[u] & neighbor_sets[v]
        total += sum(1 for w in common if w > v)
    return total


def clustering_coef(graph: HetGraph) -> float:
    """Average local clustering coefficient over all nodes."""
    if graph.n_nodes == 0:
        return 0.0
    neighbor_sets = [set(map(int, a)) for a in graph.adjacency()]
    acc = 0.0
    for u in range(graph.n_nodes):
        nbrs = sorted(neighbor_sets[u])
        d = len(nbrs)
        if d < 2:
            continue
        links = 0
        for i in range(d):
            for j in range(i + 1, d):
                if nbrs[j] in neighbor_sets[nbrs[i]]:
                    links += 1
        acc += 2.0 * links / (d * (d - 1))
    return acc / graph.n_nodes


def powerlaw_coef(graph: HetGraph, d_min: int = 1) -> float:
    """Continuous MLE power-law exponent over degrees >= d_min."""
    degrees = graph.degrees()
    degrees = degrees[degrees >= d_min]
    if len(degrees) == 0:
        return math.inf
    if np.all(degrees == d_min):
        return math.inf  # the likelihood has no finite maximizer
    log_sum = float(np.log(degrees / (d_min - 0.5)).sum())
    return 1.0 + len(degrees) / log_sum


def assortativity(graph: HetGraph) -> float:
    """Pearson degree correlation over edge endpoints (both orientations)."""
    if graph.n_edges == 0:
        return math.nan
    deg = graph.degrees()
    xs, ys = [], []
    for u, v, _ in graph.edges:
        xs.extend((deg[u], deg[v]))
        ys.extend((deg[v], deg[u]))
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    vx = x.var()
    vy = y.var()
    if vx <= 0 or vy <= 0:
        warnings.warn("assortativity undefined: zero degree variance", RuntimeWarning)
        return math.nan
    return float(((x - x.mean()) * (y - y.mean())).mean() / math.sqrt(vx * vy))


def degree_histogram(graph: HetGraph, length: int | None = None) -> np.ndarray:
    deg = graph.degrees()
    hist = np.bincount(deg, minlength=(length or 0)).astype(np.float64)
    if graph.n_nodes:
        hist /= graph.n_nodes
    return hist


def degree_mmd(g1: HetGraph, g2: HetGraph, sigma: float = 1.0) -> float:
    """Squared MMD between the two normalized degree histograms."""
    length = max(int(g1.degrees().max(initial=0)), int(g2.degrees().max(initial=0))) + 1
    h1 = degree_histogram(g1, length)
    h2 = degree_histogram(g2, length)

    def kernel(a, b):
        tv = 0.5 * float(np.abs(a - b).sum())
        return math.exp(-(tv * tv) / (sigma * sigma))

    return kernel(h1, h1) + kernel(h2, h2) - 2.0 * kernel(h1, h2)


# ---------------------------------------------------------------------------
# Novelty and uniqueness
# ---------------------------------------------------------------------------


def eo_rate(generated: HetGraph, test: HetGraph) -> float:
    """Percentage of generated (typed, canonical) edges present in the test graph."""
    if generated.n_edges == 0:
        return 0.0
    overlap = len(generated.typed_edge_set() & test.typed_edge_set())
    return 100.0 * overlap / generated.n_edges


def uniqueness(graphs: Sequence[HetGraph]) -> float:
    """Mean pairwise normalized edge symmetric difference, in percent."""
    if len(graphs) < 2:
        raise ParameterError("uniqueness needs at least 2 graphs")
    sets = [g.typed_edge_set() for g in graphs]
    scores = []
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            union = sets[i] | sets[j]
            if not union:
                scores.append(0.0)
                continue
            diff = sets[i] ^ sets[j]
            scores.append(100.0 * len(diff) / len(union))
    return float(np.mean(scores))


# ---------------------------------------------------------------------------
# Meta-path pattern distributions
# ---------------------------------------------------------------------------


@dataclass
class PatternDistribution:
    counts: dict[MetaPathPattern, int]
    total: int

    @property
    def probabilities(self) -> dict[MetaPathPattern, float]:
        return {p: c / self.total for p, c in self.counts.items()}

    @property
    def by_length(self) -> dict[int, float]:
        marginal: dict[int, float] = {}
        for p, c in self.counts.items():
            marginal[p.length] = marginal.get(p.length, 0.0) + c / self.total
        return marginal

    def conditional(self, length: int) -> dict[MetaPathPattern, float]:
        mass = sum(c for p, c in self.counts.items() if p.length == length)
        if mass == 0:
            return {}
        return {p: c / mass for p, c in self.counts.items() if p.length == length}

    @property
    def n_patterns(self) -> int:
        return len(self.counts)


def metapath_distribution(
    graph: HetGraph,
    lengths: Iterable[int],
    samples: int,
    rng: np.random.Generator,
) -> PatternDistribution:
    """Estimate the pattern distribution by uniform walk sampling."""
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    choices = sorted(set(int(l) for l in lengths))
    if not choices:
        raise ParameterError("lengths must be non-empty")
    counts: dict[MetaPathPattern, int] = {}
    for _ in range(samples):
        l = choices[rng.integers(len(choices))]
        pattern = extract_pattern(sample_walk(graph, l, rng))
        counts[pattern] = counts.get(pattern, 0) + 1
    return PatternDistribution(counts, samples)


def total_variation(p: dict, q: dict) -> float:
    support = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in support)


@dataclass
class DistributionDistance:
    tv_overall: float
    tv_by_length: dict[int, float]
    tv_length_marginal: float


def distribution_distance(p: PatternDistribution, q: PatternDistribution) -> DistributionDistance:
    """Total-variation distances: joint, per-length conditional, length marginal."""
    lengths = sorted({pat.length for pat in p.counts} | {pat.length for pat in q.counts})
    by_length = {}
    for l in lengths:
        pc, qc = p.conditional(l), q.conditional(l)
        if not pc and not qc:
            continue
        if not pc or not qc:
            by_length[l] = 1.0
        else:
            by_length[l] = total_variation(pc, qc)
    return DistributionDistance(
        tv_overall=total_variation(p.probabilities, q.probabilities),
        tv_by_length=by_length,
        tv_length_marginal=total_variation(p.by_length, q.by_length),
    )
