"""Uniform heterogeneous walk sampling and meta-path pattern extraction.

A walk's length is counted in edges: a length-3 walk visits 4 nodes.  The
walk corpus sampled here is the "real" side of adversarial training and
also the estimator behind pattern-distribution metrics.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import GraphFormatError, GraphIntegrityError, ParameterError, SamplingError
from .graph import HetGraph, TypeSchema


@dataclass(frozen=True)
class HeteroWalk:
    """A node sequence together with its node-type and edge-type skeleton."""

    node_seq: tuple[int, ...]
    type_seq: tuple[int, ...]
    edge_type_seq: tuple[int, ...]

    def __post_init__(self):
        if len(self.type_seq) != len(self.node_seq):
            raise ParameterError("type_seq length must equal node_seq length")
        if len(self.edge_type_seq) != len(self.node_seq) - 1:
            raise ParameterError("edge_type_seq must have one entry per step")

    @property
    def length(self) -> int:
        """Number of edges."""
        return len(self.node_seq) - 1

    def validate_against(self, graph: HetGraph) -> None:
        for node, t in zip(self.node_seq, self.type_seq):
            if graph.node_types[node] != t:
                raise GraphIntegrityError(f"walk type {t} disagrees with graph at node {node}")
        for (u, v), t in zip(zip(self.node_seq, self.node_seq[1:]), self.edge_type_seq):
            if graph.edge_type_of(u, v) != t:
                raise GraphIntegrityError(f"walk edge ({u}, {v}) type mismatch")


@dataclass(frozen=True)
class MetaPathPattern:
    """The type skeleton of a walk: node types joined by edge types."""

    type_seq: tuple[int, ...]
    edge_type_seq: tuple[int, ...]

    def __post_init__(self):
        if len(self.type_seq) != len(self.edge_type_seq) + 1:
            raise ParameterError("pattern needs exactly one more node type than edge types")

    @property
    def length(self) -> int:
        return len(self.edge_type_seq)

    @property
    def start_type(self) -> int:
        return self.type_seq[0]

    def label(self, schema: TypeSchema) -> str:
        parts = [schema.node_type_labels[self.type_seq[0]]]
        for t, e in zip(self.type_seq[1:], self.edge_type_seq):
            parts.append(schema.edge_type_labels[e])
            parts.append(schema.node_type_labels[t])
        return ",".join(parts)


def extract_pattern(walk: HeteroWalk) -> MetaPathPattern:
    return MetaPathPattern(walk.type_seq, walk.edge_type_seq)


def walk_from_nodes(graph: HetGraph, nodes: Sequence[int]) -> HeteroWalk:
    """Bind a node sequence to its type/edge-type skeleton from the graph."""
    types = tuple(int(graph.node_types[v]) for v in nodes)
    edge_types = tuple(graph.edge_type_of(u, v) for u, v in zip(nodes, nodes[1:]))
    return HeteroWalk(tuple(int(v) for v in nodes), types, edge_types)


def sample_walk(graph: HetGraph, length: int, rng: np.random.Generator) -> HeteroWalk:
    """Uniform random walk: uniform non-isolated start, uniform neighbor steps."""
    if length < 1:
        raise ParameterError("walk length must be >= 1")
    if graph.n_edges == 0:
        raise SamplingError("cannot sample a walk from an edgeless graph")
    adj = graph.adjacency()
    deg = graph.degrees()
    non_isolated = np.flatnonzero(deg > 0)
    cur = int(non_isolated[rng.integers(len(non_isolated))])
    nodes = [cur]
    for _ in range(length):
        nbrs = adj[cur]
        if len(nbrs) == 0:  # unreachable after a first edge in an undirected graph
            break
        cur = int(nbrs[rng.integers(len(nbrs))])
        nodes.append(cur)
    return walk_from_nodes(graph, nodes)


def sample_corpus(
    graph: HetGraph,
    count: int,
    lengths: Iterable[int],
    rng: np.random.Generator,
) -> list[HeteroWalk]:
    """Sample ``count`` walks, each length drawn uniformly from ``lengths``."""
    if count < 1:
        raise ParameterError("corpus size must be >= 1")
    choices = sorted(set(int(l) for l in lengths))
    if not choices:
        raise ParameterError("lengths must be non-empty")
    if any(l < 1 for l in choices):
        raise ParameterError("walk lengths must be >= 1")
    walks = []
    for _ in range(count):
        l = choices[rng.integers(len(choices))]
        walks.append(sample_walk(graph, l, rng))
    return walks


# ---------------------------------------------------------------------------
# Corpus file format: one walk per line,
#   v1:T1,E1,v2:T2,E2,...,vn:Tn
# with node ids and type/edge labels in comma-separated alternation.
# ---------------------------------------------------------------------------


def save_corpus(walks: Sequence[HeteroWalk], schema: TypeSchema, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for w in walks:
            parts = [f"{w.node_seq[0]}:{schema.node_type_labels[w.type_seq[0]]}"]
            for node, t, e in zip(w.node_seq[1:], w.type_seq[1:], w.edge_type_seq):
                parts.append(schema.edge_type_labels[e])
                parts.append(f"{node}:{schema.node_type_labels[t]}")
            fh.write(",".join(parts) + "\n")


def load_corpus(path, schema: TypeSchema) -> list[HeteroWalk]:
    node_type_idx = {l: i for i, l in enumerate(schema.node_type_labels)}
    edge_type_idx = {l: i for i, l in enumerate(schema.edge_type_labels)}
    walks = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split(",")
            if len(tokens) % 2 != 1:
                raise GraphFormatError(path, line_no, "token count must be odd")
            nodes, types, edge_types = [], [], []
            for i, tok in enumerate(tokens):
                if i % 2 == 0:
                    if ":" not in tok:
                        raise GraphFormatError(path, line_no, f"bad node token {tok!r}")
                    raw_id, label = tok.split(":", 1)
                    if label not in node_type_idx:
                        raise GraphFormatError(path, line_no, f"unknown node type {label!r}")
                    nodes.append(int(raw_id))
                    types.append(node_type_idx[label])
                else:
                    if tok not in edge_type_idx:
                        raise GraphFormatError(path, line_no, f"unknown edge type {tok!r}")
                    edge_types.append(edge_type_idx[tok])
            walks.append(HeteroWalk(tuple(nodes), tuple(types), tuple(edge_types)))
    return walks
