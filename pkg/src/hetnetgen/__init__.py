"""hetnetgen: generative modeling of heterogeneous graphs.

The pipeline learns the joint distribution of random walks and their
meta-paths from a typed graph with an adversarially trained recurrent
generator, then assembles new graphs from generated walks with a
stratified, pattern-guided edge sampler, and evaluates the results with a
statistics suite.
"""

from .assembler import (
    MetaPathTable,
    ScoreMatrix,
    assemble,
    build_pattern_table,
    build_score_matrix,
    pattern_preservation,
)
from .config import TrainConfig
from .embedding import EmbeddingTable, train_embeddings, type_distances
from .gan import (
    DiscriminatorParams,
    GeneratorParams,
    critic_step,
    generate_walk,
    generate_walks,
    generator_step,
    score_walk,
    train,
)
from .graph import HetGraph, TypeSchema, load_graph, save_graph, split_edges, synth_hetero_graph
from .metrics import (
    PatternDistribution,
    assortativity,
    clustering_coef,
    degree_mmd,
    distribution_distance,
    eo_rate,
    lcc,
    metapath_distribution,
    powerlaw_coef,
    triangle_count,
    uniqueness,
)
from .walks import HeteroWalk, MetaPathPattern, extract_pattern, sample_corpus, sample_walk

__version__ = "0.1.0"

__all__ = [
    "DiscriminatorParams",
    "EmbeddingTable",
    "GeneratorParams",
    "HetGraph",
    "HeteroWalk",
    "MetaPathPattern",
    "MetaPathTable",
    "PatternDistribution",
    "ScoreMatrix",
    "TrainConfig",
    "TypeSchema",
    "assemble",
    "assortativity",
    "build_pattern_table",
    "build_score_matrix",
    "clustering_coef",
    "critic_step",
    "degree_mmd",
    "distribution_distance",
    "eo_rate",
    "extract_pattern",
    "generate_walk",
    "generate_walks",
    "generator_step",
    "lcc",
    "load_graph",
    "metapath_distribution",
    "pattern_preservation",
    "powerlaw_coef",
    "sample_corpus",
    "sample_walk",
    "save_graph",
    "score_walk",
    "split_edges",
    "synth_hetero_graph",
    "train",
    "train_embeddings",
    "triangle_count",
    "type_distances",
    "uniqueness",
]
