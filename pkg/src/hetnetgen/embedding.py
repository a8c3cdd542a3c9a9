"""Heterogeneous node embeddings via skip-gram with negative sampling.

Embeddings are trained on a walk corpus (all nodes within ``window``
positions of a center node are its contexts, regardless of type) and then
frozen.  The generator uses them for structure-aware node sampling: a
latent query vector is compared against all same-type embeddings and the
next node is drawn from a softmax over negative squared distances.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GraphFormatError, ParameterError, SamplingError
from .graph import HetGraph
from .walks import HeteroWalk


@dataclass
class EmbeddingTable:
    """Frozen per-node vectors plus per-type node indices."""

    dim: int
    vectors: np.ndarray  # (n_nodes, dim) float64
    by_type: dict[int, np.ndarray]  # type index -> sorted node ids

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[1] != self.dim:
            raise ParameterError("vectors must be (n_nodes, dim)")
        self._type_matrices: dict[int, np.ndarray] = {}

    @property
    def n_nodes(self) -> int:
        return self.vectors.shape[0]

    def vector(self, node_id: int) -> np.ndarray:
        return self.vectors[node_id]

    def type_members(self, type_index: int) -> np.ndarray:
        if type_index not in self.by_type:
            raise SamplingError(f"no nodes of type {type_index}")
        return self.by_type[type_index]

    def type_matrix(self, type_index: int) -> np.ndarray:
        """Embedding rows of all nodes of one type, in by_type order."""
        if type_index not in self._type_matrices:
            self._type_matrices[type_index] = self.vectors[self.type_members(type_index)]
        return self._type_matrices[type_index]

    def normalized(self, eps: float = 1e-12) -> "EmbeddingTable":
        """Copy with L2-normalized rows (distance-based sampling then works on
        the unit sphere, which keeps the selection softmax's spread bounded)."""
        norms = np.linalg.norm(self.vectors, axis=1, keepdims=True)
        return EmbeddingTable(self.dim, self.vectors / np.maximum(norms, eps),
                              dict(self.by_type))


def type_distances(
    table: EmbeddingTable, query: np.ndarray, type_index: int
) -> list[tuple[int, float]]:
    """Squared Euclidean distance from ``query`` to every node of one type."""
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (table.dim,):
        raise ParameterError(f"query must have dimension {table.dim}")
    members = table.type_members(type_index)
    if len(members) == 0:
        raise SamplingError(f"type {type_index} has no members")
    diffs = table.type_matrix(type_index) - query
    d2 = np.einsum("ij,ij->i", diffs, diffs)
    return [(int(m), float(d)) for m, d in zip(members, d2)]


def _by_type_index(graph: HetGraph) -> dict[int, np.ndarray]:
    return {
        t: graph.nodes_of_type(t)
        for t in range(graph.schema.n_node_types)
        if len(graph.nodes_of_type(t)) > 0
    }


def train_embeddings(
    corpus: Sequence[HeteroWalk],
    graph: HetGraph,
    dim: int = 32,
    window: int = 2,
    negatives: int = 5,
    epochs: int = 3,
    lr: float = 0.025,
    rng: np.random.Generator | None = None,
) -> EmbeddingTable:
    """Train skip-gram embeddings over the walk corpus.

    Initialization is uniform in [-0.5/dim, +0.5/dim] (input side) and zero
    (context side).  Negative contexts are drawn from the corpus unigram
    distribution raised to 0.75.  With epochs=0 the table equals its seeded
    initialization; nodes absent from the corpus keep theirs either way.
    """
    if not corpus:
        raise ParameterError("corpus must be non-empty")
    if dim < 2:
        raise ParameterError("dim must be >= 2")
    if negatives < 1:
        raise ParameterError("negatives must be >= 1")
    if rng is None:
        rng = np.random.default_rng(0)

    n = graph.n_nodes
    w_in = (rng.random((n, dim)) - 0.5) / dim
    w_out = np.zeros((n, dim))

    counts = np.zeros(n, dtype=np.float64)
    for walk in corpus:
        for v in walk.node_seq:
            counts[v] += 1
    noise = counts**0.75
    total = noise.sum()
    if total <= 0:
        raise ParameterError("corpus mentions no graph nodes")
    noise_cdf = np.cumsum(noise / total)

    pairs: list[tuple[int, int]] = []
    for walk in corpus:
        seq = walk.node_seq
        for i, center in enumerate(seq):
            lo = max(0, i - window)
            hi = min(len(seq), i + window + 1)
            for j in range(lo, hi):
                if j != i:
                    pairs.append((center, seq[j]))

    for _ in range(epochs):
        for center, context in pairs:
            neg = np.searchsorted(noise_cdf, rng.random(negatives))
            targets = np.empty(negatives + 1, dtype=np.int64)
            targets[0] = context
            targets[1:] = neg
            labels = np.zeros(negatives + 1)
            labels[0] = 1.0
            v = w_in[center]
            out = w_out[targets]
            scores = 1.0 / (1.0 + np.exp(-out @ v))
            err = (scores - labels) * lr  # (negatives+1,)
            grad_v = err @ out
            w_out[targets] -= np.outer(err, v)
            w_in[center] = v - grad_v

    return EmbeddingTable(dim=dim, vectors=w_in, by_type=_by_type_index(graph))


# ---------------------------------------------------------------------------
# Checkpoint format: a manifest line `dim=<d> count=<n>` followed by the raw
# payload of n*d little-endian float64 values in node_id order.
# ---------------------------------------------------------------------------


def save_table(table: EmbeddingTable, path) -> None:
    with open(path, "wb") as fh:
        fh.write(f"dim={table.dim} count={table.n_nodes}\n".encode("ascii"))
        fh.write(table.vectors.astype("<f8").tobytes(order="C"))


def load_table(path, graph: HetGraph) -> EmbeddingTable:
    with open(path, "rb") as fh:
        manifest = fh.readline().decode("ascii").strip()
        try:
            fields = dict(part.split("=") for part in manifest.split())
            dim, count = int(fields["dim"]), int(fields["count"])
        except (ValueError, KeyError) as exc:
            raise GraphFormatError(path, 1, f"bad embedding manifest {manifest!r}") from exc
        payload = fh.read()
    expected = count * dim * struct.calcsize("<d")
    if len(payload) != expected:
        raise GraphFormatError(path, 2, f"payload is {len(payload)} bytes, expected {expected}")
    vectors = np.frombuffer(payload, dtype="<f8").reshape(count, dim).copy()
    return EmbeddingTable(dim=dim, vectors=vectors, by_type=_by_type_index(graph))
