"""Assemble heterogeneous graphs from walk multisets.

The stratified strategy walks three nested samplers: a start node drawn
from the score-matrix degree distribution, a meta-path pattern drawn from
the pattern frequencies conditioned on the start type, and a pattern-
constrained extension that moves proportionally to score-matrix rows.
Completed extensions contribute their consecutive pairs as edges; dead
ends contribute nothing and trigger a fresh restart, so the completed-
pattern trace keeps the pattern distribution of the input walks.

The ``uniform`` strategy is the reduced variant used in ablations: edges
are drawn from the score-matrix mass directly, ignoring patterns.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import AssemblyStallError, GraphIntegrityError, ParameterError, SamplingError
from .graph import HetGraph, TypeSchema
from .walks import HeteroWalk, MetaPathPattern, extract_pattern

_STALL_FACTOR = 10  # consecutive fruitless iterations per requested edge


class ScoreMatrix:
    """Sparse symmetric pair-count matrix with per-node degree totals."""

    def __init__(self, num_nodes: int):
        if num_nodes < 1:
            raise ParameterError("num_nodes must be >= 1")
        self.num_nodes = num_nodes
        self._rows: list[dict[int, int]] = [dict() for _ in range(num_nodes)]
        self.degrees = np.zeros(num_nodes, dtype=np.int64)
        self.total = 0

    def add_pair(self, u: int, v: int) -> None:
        if not (0 <= u < self.num_nodes and 0 <= v < self.num_nodes):
            raise GraphIntegrityError(f"pair ({u}, {v}) outside node range")
        self._rows[u][v] = self._rows[u].get(v, 0) + 1
        self._rows[v][u] = self._rows[v].get(u, 0) + 1
        self.degrees[u] += 1
        self.degrees[v] += 1
        self.total += 1

    def count(self, u: int, v: int) -> int:
        return self._rows[u].get(v, 0)

    def row(self, u: int) -> dict[int, int]:
        return self._rows[u]

    def support(self) -> set[tuple[int, int]]:
        """Distinct canonical pairs with positive count (self-pairs excluded)."""
        pairs = set()
        for u, row in enumerate(self._rows):
            for v in row:
                if u < v:
                    pairs.add((u, v))
        return pairs


def build_score_matrix(walks: Sequence[HeteroWalk], num_nodes: int) -> ScoreMatrix:
    """Count consecutive node pairs over all walks into a symmetric matrix."""
    s = ScoreMatrix(num_nodes)
    for walk in walks:
        seq = walk.node_seq
        for u, v in zip(seq, seq[1:]):
            s.add_pair(u, v)
    return s


@dataclass
class MetaPathTable:
    """Pattern multiset counts plus totals per start type."""

    counts: dict[MetaPathPattern, int]
    start_totals: dict[int, int]

    @classmethod
    def from_counter(cls, counter: Counter) -> "MetaPathTable":
        start_totals: dict[int, int] = {}
        for pattern, c in counter.items():
            start_totals[pattern.start_type] = start_totals.get(pattern.start_type, 0) + c
        return cls(dict(counter), start_totals)

    def probabilities(self) -> dict[MetaPathPattern, float]:
        total = sum(self.counts.values())
        return {p: c / total for p, c in self.counts.items()}


def build_pattern_table(walks: Sequence[HeteroWalk]) -> MetaPathTable:
    if not walks:
        raise ParameterError("walks must be non-empty")
    return MetaPathTable.from_counter(Counter(extract_pattern(w) for w in walks))


def sample_start(
    s: ScoreMatrix, types: np.ndarray, rng: np.random.Generator
) -> tuple[int, int]:
    """Draw a node proportionally to its score-matrix degree."""
    if s.total == 0:
        raise SamplingError("score matrix has no mass")
    cdf = np.cumsum(s.degrees / s.degrees.sum())
    node = int(np.searchsorted(cdf, rng.random(), side="right"))
    node = min(node, s.num_nodes - 1)
    return node, int(types[node])


def sample_pattern(
    table: MetaPathTable, start_type: int, rng: np.random.Generator
) -> MetaPathPattern:
    """Draw a pattern from the conditional frequencies for one start type."""
    eligible = sorted(
        ((p, c) for p, c in table.counts.items() if p.start_type == start_type),
        key=lambda item: (item[0].type_seq, item[0].edge_type_seq),
    )
    if not eligible:
        raise SamplingError(f"no pattern starts with type {start_type}")
    weights = np.array([c for _, c in eligible], dtype=np.float64)
    cdf = np.cumsum(weights / weights.sum())
    pick = min(int(np.searchsorted(cdf, rng.random(), side="right")), len(eligible) - 1)
    return eligible[pick][0]


def extend_by_pattern(
    s: ScoreMatrix,
    types: np.ndarray,
    pattern: MetaPathPattern,
    start: int,
    rng: np.random.Generator,
) -> tuple[list[int], bool]:
    """Follow a pattern from ``start``; returns (sequence, completed).

    At each step the candidate set is every score-supported neighbor of
    the current node with the required next type (the current node itself
    is excluded so assembled graphs stay simple).  A dead end returns the
    partial sequence flagged incomplete.
    """
    if int(types[start]) != pattern.type_seq[0]:
        raise ParameterError(
            f"start node type {int(types[start])} does not match pattern head "
            f"{pattern.type_seq[0]}"
        )
    seq = [start]
    cur = start
    for required in pattern.type_seq[1:]:
        row = s.row(cur)
        cand = [(v, c) for v, c in sorted(row.items()) if v != cur and types[v] == required]
        if not cand:
            return seq, False
        weights = np.array([c for _, c in cand], dtype=np.float64)
        cdf = np.cumsum(weights / weights.sum())
        pick = min(int(np.searchsorted(cdf, rng.random(), side="right")), len(cand) - 1)
        cur = cand[pick][0]
        seq.append(cur)
    return seq, True


def _edge_type_evidence(walks: Sequence[HeteroWalk]) -> dict[tuple[int, int], int]:
    """Majority edge type per unordered node-type pair, ties to lowest index."""
    votes: dict[tuple[int, int], Counter] = {}
    for walk in walks:
        for (a, b), e in zip(zip(walk.type_seq, walk.type_seq[1:]), walk.edge_type_seq):
            key = (a, b) if a <= b else (b, a)
            votes.setdefault(key, Counter())[e] += 1
    majority = {}
    for key, counter in votes.items():
        best = sorted(counter.items(), key=lambda item: (-item[1], item[0]))[0][0]
        majority[key] = best
    return majority


class _EdgeTyper:
    """Resolve output edge types: schema rule first, walk evidence second."""

    def __init__(self, schema: Optional[TypeSchema], walks: Sequence[HeteroWalk]):
        self.schema = schema
        self.evidence = _edge_type_evidence(walks)

    def edge_type(self, type_a: int, type_b: int) -> int:
        rule_t = self.schema.rule_lookup(type_a, type_b) if self.schema else None
        if rule_t is not None:
            return rule_t
        key = (type_a, type_b) if type_a <= type_b else (type_b, type_a)
        if key in self.evidence:
            return self.evidence[key]
        return 0

    def output_schema(self, typed_edges, types: np.ndarray) -> TypeSchema:
        """Extend the rule with any node-type pairs new to the assembled graph."""
        if self.schema.edge_type_rule is None:
            return self.schema
        rule = dict(self.schema.edge_type_rule)
        for u, v, t in typed_edges:
            a, b = int(types[u]), int(types[v])
            for key in ((a, b), (b, a)):
                rule.setdefault(key, t)
        return self.schema.with_rule(rule)


@dataclass
class AssemblyResult:
    graph: HetGraph
    trace: list[MetaPathPattern]
    restarts: int


def assemble(
    walks: Sequence[HeteroWalk],
    num_nodes: int,
    types: np.ndarray,
    schema: TypeSchema,
    target_edges: int,
    rng: np.random.Generator,
    strategy: str = "stratified",
    node_labels: Optional[Sequence[str]] = None,
) -> AssemblyResult:
    """Build a graph with ``target_edges`` distinct edges from walk evidence.

    Raises :class:`AssemblyStallError` (carrying the partial graph) after
    ``10 * target_edges`` consecutive iterations that add no new edge.
    """
    if target_edges < 1:
        raise ParameterError("target_edges must be >= 1")
    if not walks:
        raise ParameterError("walks must be non-empty")
    if strategy not in ("stratified", "uniform"):
        raise ParameterError(f"unknown assembly strategy {strategy!r}")

    s = build_score_matrix(walks, num_nodes)
    table = build_pattern_table(walks)
    typer = _EdgeTyper(schema, walks)
    types = np.asarray(types, dtype=np.int64)

    edges: dict[tuple[int, int], int] = {}
    trace: list[MetaPathPattern] = []
    restarts = 0
    fruitless = 0
    stall_bound = _STALL_FACTOR * target_edges

    if strategy == "uniform":
        sampler = _UniformEdgeSampler(s, types, typer)

    def build_graph() -> HetGraph:
        typed = [(u, v, t) for (u, v), t in sorted(edges.items())]
        out_schema = typer.output_schema(typed, types)
        return HetGraph(types, typed, out_schema, node_labels)

    while len(edges) < target_edges:
        if fruitless >= stall_bound:
            raise AssemblyStallError(
                f"assembly stalled at {len(edges)}/{target_edges} edges", build_graph()
            )
        if strategy == "uniform":
            pair, pattern = sampler.draw(rng)
            trace.append(pattern)
            added = _add_edge(edges, pair, types, typer)
        else:
            node, start_type = sample_start(s, types, rng)
            try:
                pattern = sample_pattern(table, start_type, rng)
            except SamplingError:
                restarts += 1
                fruitless += 1
                continue
            seq, completed = extend_by_pattern(s, types, pattern, node, rng)
            if not completed:
                restarts += 1
                fruitless += 1
                continue
            trace.append(pattern)
            added = 0
            for u, v in zip(seq, seq[1:]):
                added += _add_edge(edges, (u, v), types, typer)
        fruitless = 0 if added else fruitless + 1

    return AssemblyResult(build_graph(), trace, restarts)


def _add_edge(edges, pair, types, typer) -> int:
    u, v = pair
    if u == v:
        return 0
    key = (u, v) if u < v else (v, u)
    if key in edges:
        return 0
    edges[key] = typer.edge_type(int(types[u]), int(types[v]))
    return 1


class _UniformEdgeSampler:
    """Draw canonical pairs proportionally to score mass, ignoring patterns.

    Each draw is logged as a length-1 pattern with coin-flip orientation,
    which is what the preservation harness reports for this strategy.
    """

    def __init__(self, s: ScoreMatrix, types: np.ndarray, typer: _EdgeTyper):
        pairs = sorted(s.support())
        if not pairs:
            raise SamplingError("score matrix has no off-diagonal support")
        self.pairs = pairs
        self.types = types
        self.typer = typer
        weights = np.array([s.count(u, v) for u, v in pairs], dtype=np.float64)
        self.cdf = np.cumsum(weights / weights.sum())

    def draw(self, rng: np.random.Generator):
        pick = min(int(np.searchsorted(self.cdf, rng.random(), side="right")),
                   len(self.pairs) - 1)
        u, v = self.pairs[pick]
        if rng.random() < 0.5:
            u, v = v, u
        ta, tb = int(self.types[u]), int(self.types[v])
        pattern = MetaPathPattern((ta, tb), (self.typer.edge_type(ta, tb),))
        return (u, v), pattern


# ---------------------------------------------------------------------------
# Pattern-preservation harness
# ---------------------------------------------------------------------------


@dataclass
class PreservationReport:
    tv: float
    empirical: dict[MetaPathPattern, float]
    target: dict[MetaPathPattern, float]
    completions: int
    restarts: int


def assembly_trace(
    walks: Sequence[HeteroWalk],
    num_nodes: int,
    types: np.ndarray,
    n_patterns: int,
    rng: np.random.Generator,
    probabilistic: bool = False,
    schema: Optional[TypeSchema] = None,
) -> tuple[list[MetaPathPattern], int]:
    """Run the assembly sampler until ``n_patterns`` completions; no edge cap."""
    if n_patterns < 1:
        raise ParameterError("n_patterns must be >= 1")
    s = build_score_matrix(walks, num_nodes)
    table = build_pattern_table(walks)
    types = np.asarray(types, dtype=np.int64)
    trace: list[MetaPathPattern] = []
    restarts = 0
    if probabilistic:
        sampler = _UniformEdgeSampler(s, types, _EdgeTyper(schema, walks))
        while len(trace) < n_patterns:
            _, pattern = sampler.draw(rng)
            trace.append(pattern)
        return trace, restarts
    guard = 1000 * n_patterns
    attempts = 0
    while len(trace) < n_patterns:
        attempts += 1
        if attempts > guard:
            raise SamplingError("assembly trace cannot complete enough patterns")
        node, start_type = sample_start(s, types, rng)
        try:
            pattern = sample_pattern(table, start_type, rng)
        except SamplingError:
            restarts += 1
            continue
        _, completed = extend_by_pattern(s, types, pattern, node, rng)
        if not completed:
            restarts += 1
            continue
        trace.append(pattern)
    return trace, restarts


def pattern_preservation(
    walks: Sequence[HeteroWalk],
    num_nodes: int,
    types: np.ndarray,
    n_patterns: int,
    rng: np.random.Generator,
    probabilistic: bool = False,
    schema: Optional[TypeSchema] = None,
) -> PreservationReport:
    """Compare the completed-pattern trace against the input pattern multiset."""
    trace, restarts = assembly_trace(walks, num_nodes, types, n_patterns, rng,
                                     probabilistic=probabilistic, schema=schema)
    table = build_pattern_table(walks)
    target = table.probabilities()
    counter = Counter(trace)
    empirical = {p: c / len(trace) for p, c in counter.items()}
    support = set(target) | set(empirical)
    tv = 0.5 * sum(abs(target.get(p, 0.0) - empirical.get(p, 0.0)) for p in support)
    return PreservationReport(tv, empirical, target, len(trace), restarts)
