"""Typed-graph data model, TSV I/O, synthetic dataset construction and edge splits.

Graphs are undirected and simple: no self-loops, no parallel edges, every
edge stored once in canonical ``(u, v, edge_type)`` form with ``u < v``.
Node ids are dense integers assigned at load time; original string ids are
kept in a side list for reporting.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import GraphFormatError, GraphIntegrityError, ParameterError


@dataclass(frozen=True)
class TypeSchema:
    """Node/edge type vocabulary of a heterogeneous graph.

    ``edge_type_rule`` maps an unordered node-type pair to the single edge
    type observed between those types; it is None when some pair carries
    more than one relation type.  ``eos_index`` is a reserved virtual node
    type used by sequence models to mark end-of-walk; it can never be
    assigned to a node.
    """

    node_type_labels: tuple[str, ...]
    edge_type_labels: tuple[str, ...]
    edge_type_rule: Optional[dict[tuple[int, int], int]] = None

    def __post_init__(self):
        if len(set(self.node_type_labels)) != len(self.node_type_labels):
            raise ParameterError("duplicate node type labels")
        if len(set(self.edge_type_labels)) != len(self.edge_type_labels):
            raise ParameterError("duplicate edge type labels")
        if self.edge_type_rule is not None:
            for (a, b), t in self.edge_type_rule.items():
                if self.edge_type_rule.get((b, a), t) != t:
                    raise ParameterError(f"edge type rule not symmetric for pair ({a}, {b})")

    @property
    def n_node_types(self) -> int:
        return len(self.node_type_labels)

    @property
    def n_edge_types(self) -> int:
        return len(self.edge_type_labels)

    @property
    def eos_index(self) -> int:
        """Index of the reserved end-of-sequence pseudo type."""
        return len(self.node_type_labels)

    def rule_lookup(self, type_a: int, type_b: int) -> Optional[int]:
        if self.edge_type_rule is None:
            return None
        return self.edge_type_rule.get((type_a, type_b))

    def with_rule(self, rule: Optional[dict[tuple[int, int], int]]) -> "TypeSchema":
        return TypeSchema(self.node_type_labels, self.edge_type_labels, rule)


class HetGraph:
    """Immutable undirected simple graph with typed nodes and edges."""

    def __init__(
        self,
        node_types: Sequence[int],
        edges: Iterable[tuple[int, int, int]],
        schema: TypeSchema,
        node_labels: Optional[Sequence[str]] = None,
    ):
        self.schema = schema
        self.node_types = np.asarray(node_types, dtype=np.int64)
        canon = set()
        for u, v, t in edges:
            if u == v:
                raise GraphIntegrityError(f"self-loop at node {u}")
            a, b = (u, v) if u < v else (v, u)
            canon.add((int(a), int(b), int(t)))
        self.edges: tuple[tuple[int, int, int], ...] = tuple(sorted(canon))
        if node_labels is None:
            node_labels = [str(i) for i in range(len(self.node_types))]
        self.node_labels = list(node_labels)
        self._validate()
        self._adj: Optional[list[np.ndarray]] = None
        self._edge_type_map: Optional[dict[tuple[int, int], int]] = None
        self._degrees: Optional[np.ndarray] = None

    def _validate(self):
        n = len(self.node_types)
        if len(self.node_labels) != n:
            raise GraphIntegrityError("node label list length mismatch")
        if n and (self.node_types.min() < 0 or self.node_types.max() >= self.schema.n_node_types):
            raise GraphIntegrityError("node type index out of schema range")
        pair_seen: dict[tuple[int, int], int] = {}
        for u, v, t in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphIntegrityError(f"edge ({u}, {v}) references unknown node")
            if not (0 <= t < self.schema.n_edge_types):
                raise GraphIntegrityError(f"edge type index {t} out of schema range")
            if (u, v) in pair_seen:
                raise GraphIntegrityError(f"parallel edge on pair ({u}, {v})")
            pair_seen[(u, v)] = t
            rule_t = self.schema.rule_lookup(int(self.node_types[u]), int(self.node_types[v]))
            if rule_t is not None and rule_t != t:
                raise GraphIntegrityError(
                    f"edge ({u}, {v}) type {t} contradicts schema rule {rule_t}"
                )

    @property
    def n_nodes(self) -> int:
        return len(self.node_types)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        if self._degrees is None:
            deg = np.zeros(self.n_nodes, dtype=np.int64)
            for u, v, _ in self.edges:
                deg[u] += 1
                deg[v] += 1
            self._degrees = deg
        return self._degrees

    def adjacency(self) -> list[np.ndarray]:
        """Neighbor id arrays (sorted ascending), one per node."""
        if self._adj is None:
            lists: list[list[int]] = [[] for _ in range(self.n_nodes)]
            for u, v, _ in self.edges:
                lists[u].append(v)
                lists[v].append(u)
            self._adj = [np.asarray(sorted(l), dtype=np.int64) for l in lists]
        return self._adj

    def _pair_map(self) -> dict[tuple[int, int], int]:
        if self._edge_type_map is None:
            self._edge_type_map = {(u, v): t for u, v, t in self.edges}
        return self._edge_type_map

    def edge_type_of(self, u: int, v: int) -> int:
        a, b = (u, v) if u < v else (v, u)
        try:
            return self._pair_map()[(a, b)]
        except KeyError:
            raise GraphIntegrityError(f"no edge between {u} and {v}") from None

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._pair_map()

    def edge_pair_set(self) -> frozenset[tuple[int, int]]:
        return frozenset((u, v) for u, v, _ in self.edges)

    def typed_edge_set(self) -> frozenset[tuple[int, int, int]]:
        return frozenset(self.edges)

    def nodes_of_type(self, type_index: int) -> np.ndarray:
        return np.flatnonzero(self.node_types == type_index)

    def with_edges(self, edges: Iterable[tuple[int, int, int]], schema: Optional[TypeSchema] = None) -> "HetGraph":
        """Same node set, different edge set (used by splits and assembly)."""
        return HetGraph(self.node_types, edges, schema or self.schema, self.node_labels)


# ---------------------------------------------------------------------------
# TSV I/O
#
# Node file: one `<node_id>\t<node_type_label>` line per node.
# Edge file: one `<src_id>\t<dst_id>\t<edge_type_label>` line per edge.
# Lines starting with '#' are comments.  Schema label order is the order of
# first appearance in the files.
# ---------------------------------------------------------------------------


def _data_lines(path: Path):
    with open(path, "r", encoding="utf-8") as fh:
        for i, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            yield i, line


def load_graph(node_file, edge_file) -> HetGraph:
    """Load and validate a typed graph from node/edge TSV files."""
    node_file, edge_file = Path(node_file), Path(edge_file)
    node_labels: list[str] = []
    id_of: dict[str, int] = {}
    type_labels: list[str] = []
    type_index: dict[str, int] = {}
    raw_types: list[int] = []

    for line_no, line in _data_lines(node_file):
        parts = line.split("\t")
        if len(parts) != 2:
            raise GraphFormatError(node_file, line_no, f"expected 2 columns, got {len(parts)}")
        raw_id, label = parts
        if label not in type_index:
            type_index[label] = len(type_labels)
            type_labels.append(label)
        t = type_index[label]
        if raw_id in id_of:
            if raw_types[id_of[raw_id]] != t:
                raise GraphIntegrityError(f"node {raw_id!r} declared with conflicting types")
            continue
        id_of[raw_id] = len(node_labels)
        node_labels.append(raw_id)
        raw_types.append(t)

    edge_labels: list[str] = []
    edge_index: dict[str, int] = {}
    edges: list[tuple[int, int, int]] = []
    for line_no, line in _data_lines(edge_file):
        parts = line.split("\t")
        if len(parts) != 3:
            raise GraphFormatError(edge_file, line_no, f"expected 3 columns, got {len(parts)}")
        raw_u, raw_v, label = parts
        if raw_u not in id_of:
            raise GraphIntegrityError(f"edge references unknown node {raw_u!r}")
        if raw_v not in id_of:
            raise GraphIntegrityError(f"edge references unknown node {raw_v!r}")
        if label not in edge_index:
            edge_index[label] = len(edge_labels)
            edge_labels.append(label)
        edges.append((id_of[raw_u], id_of[raw_v], edge_index[label]))

    # Duplicate lines for the same canonical pair collapse silently; the same
    # pair under two different edge types is a parallel edge and rejected.
    dedup: dict[tuple[int, int], int] = {}
    for u, v, t in edges:
        a, b = (u, v) if u < v else (v, u)
        if a == b:
            raise GraphIntegrityError(f"self-loop on node {node_labels[a]!r}")
        if (a, b) in dedup and dedup[(a, b)] != t:
            raise GraphIntegrityError(f"pair ({node_labels[a]}, {node_labels[b]}) has two edge types")
        dedup[(a, b)] = t

    rule = _infer_rule(raw_types, dedup)
    schema = TypeSchema(tuple(type_labels), tuple(edge_labels), rule)
    return HetGraph(raw_types, [(u, v, t) for (u, v), t in dedup.items()], schema, node_labels)


def _infer_rule(node_types: Sequence[int], pair_types: dict[tuple[int, int], int]):
    """Infer the (node type, node type) -> edge type map; None if ambiguous."""
    rule: dict[tuple[int, int], int] = {}
    for (u, v), t in pair_types.items():
        a, b = node_types[u], node_types[v]
        for key in ((a, b), (b, a)):
            if rule.get(key, t) != t:
                return None
            rule[key] = t
    return rule if rule else None


class HetGraphWriteError(GraphIntegrityError):
    """Raised when graph files cannot be written."""


def save_graph(graph: HetGraph, node_file, edge_file) -> None:
    """Write a graph back to TSV; load(save(g)) reproduces g exactly."""
    node_file, edge_file = Path(node_file), Path(edge_file)
    try:
        with open(node_file, "w", encoding="utf-8", newline="\n") as fh:
            for i in range(graph.n_nodes):
                label = graph.schema.node_type_labels[graph.node_types[i]]
                fh.write(f"{graph.node_labels[i]}\t{label}\n")
        with open(edge_file, "w", encoding="utf-8", newline="\n") as fh:
            for u, v, t in graph.edges:
                fh.write(
                    f"{graph.node_labels[u]}\t{graph.node_labels[v]}\t"
                    f"{graph.schema.edge_type_labels[t]}\n"
                )
    except OSError as exc:
        raise HetGraphWriteError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Synthetic heterogeneous graphs
# ---------------------------------------------------------------------------


def synth_hetero_graph(
    num_types: int,
    per_type_size: int,
    intra_edge_prob: float,
    share_fraction: float,
    rng: np.random.Generator,
) -> HetGraph:
    """Build a random heterogeneous graph from overlapping homogeneous blocks.

    Each node type gets a block of ``per_type_size`` nodes wired internally
    as an Erdos-Renyi graph with ``intra_edge_prob``.  A ``share_fraction``
    of each block is designated as shared junction nodes, which additionally
    participate in every other block's edge generation at the same edge
    probability, producing cross-type edges and hub-like degrees.
    """
    if num_types < 2:
        raise ParameterError("num_types must be >= 2")
    if per_type_size < 2:
        raise ParameterError("per_type_size must be >= 2")
    if not (0.0 <= intra_edge_prob <= 1.0):
        raise ParameterError("intra_edge_prob must lie in [0, 1]")
    if not (0.0 <= share_fraction <= 1.0):
        raise ParameterError("share_fraction must lie in [0, 1]")

    node_type_labels = tuple(chr(ord("A") + i) for i in range(num_types))
    label_pairs = {}
    edge_labels = []
    for i in range(num_types):
        for j in range(i, num_types):
            lbl = f"{node_type_labels[i]}-{node_type_labels[j]}"
            label_pairs[(i, j)] = len(edge_labels)
            edge_labels.append(lbl)

    def edge_label_index(a: int, b: int) -> int:
        return label_pairs[(a, b) if a <= b else (b, a)]

    node_types = [t for t in range(num_types) for _ in range(per_type_size)]
    blocks = [list(range(t * per_type_size, (t + 1) * per_type_size)) for t in range(num_types)]

    n_shared = int(round(share_fraction * per_type_size))
    shared = []
    for t in range(num_types):
        members = np.array(blocks[t])
        pick = rng.permutation(per_type_size)[:n_shared]
        shared.append(sorted(int(members[i]) for i in pick))

    edges: set[tuple[int, int, int]] = set()
    for t in range(num_types):
        block = blocks[t]
        for i in range(len(block)):
            for j in range(i + 1, len(block)):
                if rng.random() < intra_edge_prob:
                    edges.add((block[i], block[j], edge_label_index(t, t)))
    # Shared junctions join every foreign block's edge process.
    for t in range(num_types):
        for u in shared[t]:
            for s in range(num_types):
                if s == t:
                    continue
                for v in blocks[s]:
                    if rng.random() < intra_edge_prob:
                        a, b = (u, v) if u < v else (v, u)
                        edges.add((a, b, edge_label_index(t, s)))

    rule = {}
    for i in range(num_types):
        for j in range(num_types):
            rule[(i, j)] = edge_label_index(i, j)
    schema = TypeSchema(node_type_labels, tuple(edge_labels), rule)
    return HetGraph(node_types, edges, schema)


def split_edges(
    graph: HetGraph, train_fraction: float, rng: np.random.Generator
) -> tuple[HetGraph, HetGraph]:
    """Partition the edge set into train/test graphs over the full node set."""
    if not (0.0 < train_fraction < 1.0):
        raise ParameterError("train_fraction must lie strictly between 0 and 1")
    edges = list(graph.edges)
    order = rng.permutation(len(edges))
    k = int(round(train_fraction * len(edges)))
    train_edges = [edges[i] for i in order[:k]]
    test_edges = [edges[i] for i in order[k:]]
    return graph.with_edges(train_edges), graph.with_edges(test_edges)


def align_to_schema(graph: HetGraph, schema: TypeSchema) -> HetGraph:
    """Re-index a graph's type labels into another schema's index space.

    Needed when graphs loaded from separate files (label order follows first
    appearance per file) must be compared index-wise.
    """
    node_map = {}
    for label in graph.schema.node_type_labels:
        if label not in schema.node_type_labels:
            raise GraphIntegrityError(f"node type {label!r} unknown to target schema")
        node_map[graph.schema.node_type_labels.index(label)] = \
            schema.node_type_labels.index(label)
    edge_map = {}
    for label in graph.schema.edge_type_labels:
        if label not in schema.edge_type_labels:
            raise GraphIntegrityError(f"edge type {label!r} unknown to target schema")
        edge_map[graph.schema.edge_type_labels.index(label)] = \
            schema.edge_type_labels.index(label)
    node_types = [node_map[int(t)] for t in graph.node_types]
    edges = [(u, v, edge_map[t]) for u, v, t in graph.edges]
    return HetGraph(node_types, edges, schema, graph.node_labels)


def connected_component_count(graph: HetGraph) -> int:
    """Number of connected components (isolated nodes count as components)."""
    n = graph.n_nodes
    if n == 0:
        return 0
    adj = graph.adjacency()
    seen = np.zeros(n, dtype=bool)
    comps = 0
    for s in range(n):
        if seen[s]:
            continue
        comps += 1
        stack = [s]
        seen[s] = True
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
    return comps
