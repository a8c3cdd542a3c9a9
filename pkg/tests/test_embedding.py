import numpy as np
import pytest

from hetnetgen.embedding import (
    EmbeddingTable,
    load_table,
    save_table,
    train_embeddings,
    type_distances,
)
from hetnetgen.errors import ParameterError, SamplingError
from hetnetgen.graph import HetGraph, TypeSchema
from hetnetgen.rng import make_rng
from hetnetgen.walks import sample_corpus


def two_cluster_graph():
    """Two dense 10-node clusters, no edges between them, one type."""
    schema = TypeSchema(("A",), ("a",), {(0, 0): 0})
    edges = []
    for base in (0, 10):
        for i in range(10):
            for j in range(i + 1, 10):
                if (i + j) % 2 == 0:
                    edges.append((base + i, base + j, 0))
    return HetGraph([0] * 20, edges, schema)


class TestTraining:
    def test_clusters_separate(self):
        g = two_cluster_graph()
        corpus = sample_corpus(g, 800, {6}, make_rng(1))
        table = train_embeddings(corpus, g, dim=16, window=2, negatives=5,
                                 epochs=5, lr=0.05, rng=make_rng(2))
        v = table.vectors / (np.linalg.norm(table.vectors, axis=1, keepdims=True) + 1e-12)
        cos = v @ v.T
        intra, inter = [], []
        for i in range(20):
            for j in range(i + 1, 20):
                (intra if (i < 10) == (j < 10) else inter).append(cos[i, j])
        assert np.mean(intra) > np.mean(inter)

    def test_zero_epochs_equals_initialization(self, single_edge_graph):
        corpus = sample_corpus(single_edge_graph, 10, {1}, make_rng(3))
        table = train_embeddings(corpus, single_edge_graph, dim=8, epochs=0, rng=make_rng(4))
        expected = (make_rng(4).random((2, 8)) - 0.5) / 8
        assert np.array_equal(table.vectors, expected)

    def test_deterministic(self, single_edge_graph):
        corpus = sample_corpus(single_edge_graph, 30, {1}, make_rng(5))
        t1 = train_embeddings(corpus, single_edge_graph, dim=8, epochs=2, rng=make_rng(6))
        t2 = train_embeddings(corpus, single_edge_graph, dim=8, epochs=2, rng=make_rng(6))
        assert np.array_equal(t1.vectors, t2.vectors)

    def test_finite_values(self):
        g = two_cluster_graph()
        corpus = sample_corpus(g, 500, {4}, make_rng(7))
        table = train_embeddings(corpus, g, dim=12, epochs=8, lr=0.2, rng=make_rng(8))
        assert np.isfinite(table.vectors).all()

    def test_empty_corpus_rejected(self, single_edge_graph):
        with pytest.raises(ParameterError):
            train_embeddings([], single_edge_graph, rng=make_rng(0))

    def test_absent_nodes_keep_initialization(self):
        schema = TypeSchema(("A",), ("a",), {(0, 0): 0})
        g = HetGraph([0] * 4, [(0, 1, 0), (2, 3, 0)], schema)
        from hetnetgen.walks import HeteroWalk

        corpus = [HeteroWalk((0, 1), (0, 0), (0,))] * 50
        table = train_embeddings(corpus, g, dim=8, epochs=3, rng=make_rng(9))
        init = (make_rng(9).random((4, 8)) - 0.5) / 8
        assert np.array_equal(table.vectors[2], init[2])
        assert np.array_equal(table.vectors[3], init[3])
        assert not np.array_equal(table.vectors[0], init[0])


class TestDistances:
    def table(self):
        vectors = np.array([[0.0, 0.0], [3.0, 4.0], [1.0, 1.0]])
        return EmbeddingTable(2, vectors, {0: np.array([0, 1]), 1: np.array([2])})

    def test_member_query_gives_zero(self):
        out = type_distances(self.table(), np.array([3.0, 4.0]), 0)
        assert out == [(0, 25.0), (1, 0.0)]

    def test_hand_arithmetic(self):
        out = type_distances(self.table(), np.array([0.0, 0.0]), 0)
        assert out == [(0, 0.0), (1, 25.0)]

    def test_single_member_type(self):
        out = type_distances(self.table(), np.array([9.0, 9.0]), 1)
        assert len(out) == 1
        assert out[0][0] == 2

    def test_symmetry(self):
        t = self.table()
        d_forward = type_distances(t, t.vectors[0], 0)[1][1]
        d_backward = type_distances(t, t.vectors[1], 0)[0][1]
        assert d_forward == d_backward

    def test_unknown_type(self):
        with pytest.raises(SamplingError):
            type_distances(self.table(), np.zeros(2), 7)

    def test_bad_query_shape(self):
        with pytest.raises(ParameterError):
            type_distances(self.table(), np.zeros(3), 0)


class TestCheckpoint:
    def test_round_trip_bitwise(self, tmp_path):
        g = two_cluster_graph()
        corpus = sample_corpus(g, 100, {3}, make_rng(10))
        table = train_embeddings(corpus, g, dim=8, epochs=1, rng=make_rng(11))
        path = tmp_path / "emb.bin"
        save_table(table, path)
        loaded = load_table(path, g)
        assert np.array_equal(loaded.vectors, table.vectors)
        assert loaded.dim == table.dim
        assert set(loaded.by_type) == set(table.by_type)

    def test_manifest_line(self, tmp_path):
        table = EmbeddingTable(2, np.zeros((3, 2)), {0: np.array([0, 1, 2])})
        path = tmp_path / "emb.bin"
        schema = TypeSchema(("A",), ("a",), {(0, 0): 0})
        save_table(table, path)
        first = path.read_bytes().split(b"\n", 1)[0]
        assert first == b"dim=2 count=3"
