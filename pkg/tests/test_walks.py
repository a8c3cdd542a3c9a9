import numpy as np
import pytest

from hetnetgen.errors import ParameterError, SamplingError
from hetnetgen.graph import HetGraph, TypeSchema
from hetnetgen.rng import make_rng
from hetnetgen.walks import (
    HeteroWalk,
    MetaPathPattern,
    extract_pattern,
    load_corpus,
    sample_corpus,
    sample_walk,
    save_corpus,
)

# chi-square critical values at p = 0.01
CHI2_99 = {3: 11.345, 19: 36.191}


class TestSampleWalk:
    def test_single_edge_symmetric(self, single_edge_graph):
        rng = make_rng(0)
        starts = [sample_walk(single_edge_graph, 1, rng).node_seq[0] for _ in range(4000)]
        frac = np.mean(np.array(starts) == 0)
        assert abs(frac - 0.5) < 0.03
        for w in (sample_walk(single_edge_graph, 1, rng) for _ in range(10)):
            assert w.node_seq in ((0, 1), (1, 0))

    def test_star_second_step_uniform(self, star_graph):
        # Walks (leaf, center, leaf'): the second step is uniform over 4 leaves.
        rng = make_rng(1)
        ends = []
        for _ in range(8000):
            w = sample_walk(star_graph, 2, rng)
            if w.node_seq[0] != 0:
                ends.append(w.node_seq[2])
        counts = np.bincount(ends, minlength=5)[1:]
        expected = len(ends) / 4
        stat = ((counts - expected) ** 2 / expected).sum()
        assert stat < CHI2_99[3]

    def test_fixed_seed_identical(self, star_graph):
        w1 = sample_walk(star_graph, 3, make_rng(9))
        w2 = sample_walk(star_graph, 3, make_rng(9))
        assert w1 == w2

    def test_edgeless_graph(self):
        g = HetGraph([0, 0], [], TypeSchema(("A",), ("a",)))
        with pytest.raises(SamplingError):
            sample_walk(g, 1, make_rng(0))

    def test_start_distribution_uniform_over_non_isolated(self):
        # Path over 20 nodes plus one isolate; starts must be uniform over the 20.
        schema = TypeSchema(("A",), ("a",), {(0, 0): 0})
        g = HetGraph([0] * 21, [(i, i + 1, 0) for i in range(19)], schema)
        rng = make_rng(3)
        starts = [sample_walk(g, 1, rng).node_seq[0] for _ in range(100000)]
        counts = np.bincount(starts, minlength=21)
        assert counts[20] == 0
        expected = len(starts) / 20
        stat = ((counts[:20] - expected) ** 2 / expected).sum()
        assert stat < CHI2_99[19]

    def test_walk_binds_to_graph(self, rng):
        from conftest import random_typed_graph

        g = random_typed_graph(25, 0.2, 3, make_rng(8))
        for _ in range(50):
            sample_walk(g, 3, rng).validate_against(g)


class TestPatterns:
    def test_extract(self):
        w = HeteroWalk((5, 9, 2), (0, 1, 2), (0, 1))
        p = extract_pattern(w)
        assert p == MetaPathPattern((0, 1, 2), (0, 1))
        assert p.length == 2

    def test_length_one(self):
        p = extract_pattern(HeteroWalk((1, 2), (0, 1), (0,)))
        assert p.length == 1

    def test_reversal(self):
        w = HeteroWalk((1, 2, 3), (0, 1, 2), (4, 5))
        r = HeteroWalk(w.node_seq[::-1], w.type_seq[::-1], w.edge_type_seq[::-1])
        assert extract_pattern(r).type_seq == extract_pattern(w).type_seq[::-1]
        assert extract_pattern(r).edge_type_seq == extract_pattern(w).edge_type_seq[::-1]

    def test_pattern_shape_validation(self):
        with pytest.raises(ParameterError):
            MetaPathPattern((0, 1), (0, 1))

    def test_sampled_length_matches_request(self, star_graph, rng):
        for length in (1, 2, 3):
            for _ in range(20):
                assert extract_pattern(sample_walk(star_graph, length, rng)).length == length


class TestCorpus:
    def test_count_and_lengths(self, single_edge_graph):
        walks = sample_corpus(single_edge_graph, 3, {1}, make_rng(0))
        assert len(walks) == 3
        assert all(w.length == 1 for w in walks)

    def test_length_mixture_uniform(self, star_graph):
        walks = sample_corpus(star_graph, 30000, {1, 2, 3}, make_rng(4))
        counts = np.bincount([w.length for w in walks], minlength=4)[1:]
        for c in counts:
            assert abs(c / 30000 - 1 / 3) < 0.02

    def test_zero_count_rejected(self, single_edge_graph):
        with pytest.raises(ParameterError):
            sample_corpus(single_edge_graph, 0, {1}, make_rng(0))

    def test_empty_lengths_rejected(self, single_edge_graph):
        with pytest.raises(ParameterError):
            sample_corpus(single_edge_graph, 5, set(), make_rng(0))

    def test_file_round_trip(self, tmp_path, star_graph):
        walks = sample_corpus(star_graph, 20, {1, 2}, make_rng(5))
        path = tmp_path / "corpus.txt"
        save_corpus(walks, star_graph.schema, path)
        loaded = load_corpus(path, star_graph.schema)
        assert loaded == walks
