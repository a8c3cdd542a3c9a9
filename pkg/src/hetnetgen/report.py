"""Batch evaluation of generated graphs and the TSV report writer.

The report is one ``metric<TAB>mean<TAB>stddev`` line per metric (reference
values of the training graph repeated with a ``ref_`` prefix), followed by
plot-ready pattern-distribution blocks, one ``pattern<TAB>probability``
line per pattern per length, for the training graph and for the pooled
generated graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import GraphIntegrityError, ParameterError
from .graph import HetGraph, TypeSchema
from .metrics import (
    DistributionDistance,
    PatternDistribution,
    assortativity,
    clustering_coef,
    degree_histogram,
    degree_mmd,
    distribution_distance,
    eo_rate,
    lcc,
    metapath_distribution,
    powerlaw_coef,
    triangle_count,
    uniqueness,
)
from .rng import make_rng

STRUCTURAL_METRICS = (
    ("lcc", lcc),
    ("triangle_count", triangle_count),
    ("clustering_coef", clustering_coef),
    ("powerlaw_coef", powerlaw_coef),
    ("assortativity", assortativity),
)


def er_control_graph(n_nodes: int, n_edges: int, rng: np.random.Generator) -> HetGraph:
    """Uniform simple graph with the given size and edge count (degree baseline)."""
    max_edges = n_nodes * (n_nodes - 1) // 2
    if n_edges > max_edges:
        raise ParameterError(f"cannot place {n_edges} simple edges on {n_nodes} nodes")
    us, vs = np.triu_indices(n_nodes, k=1)
    picks = rng.choice(max_edges, size=n_edges, replace=False)
    edges = [(int(us[i]), int(vs[i]), 0) for i in picks]
    schema = TypeSchema(("N",), ("N-N",), {(0, 0): 0})
    return HetGraph([0] * n_nodes, edges, schema)


@dataclass
class EvalReport:
    rows: list[tuple[str, float, float]]
    ref_rows: list[tuple[str, float]]
    schema: TypeSchema
    reference_dist: PatternDistribution
    generated_dist: PatternDistribution
    train_degree_hist: np.ndarray
    generated_degree_hist: np.ndarray
    per_graph_distance: list[DistributionDistance] = field(default_factory=list)

    def row(self, name: str) -> tuple[float, float]:
        for n, mean, std in self.rows:
            if n == name:
                return mean, std
        raise KeyError(name)


def _check_schema(reference: TypeSchema, other: TypeSchema, what: str) -> None:
    if (reference.node_type_labels != other.node_type_labels
            or reference.edge_type_labels != other.edge_type_labels):
        raise GraphIntegrityError(f"{what}: schema labels do not match the training graph")


def evaluate(
    generated: Sequence[HetGraph],
    train: HetGraph,
    test: HetGraph,
    seed: int,
    lengths: Sequence[int] = (1, 2, 3),
    samples: int = 20000,
) -> EvalReport:
    """Full metric sweep: structure, novelty, uniqueness, pattern distances."""
    if not generated:
        raise ParameterError("no generated graphs to evaluate")
    _check_schema(train.schema, test.schema, "test graph")
    for i, g in enumerate(generated):
        _check_schema(train.schema, g.schema, f"generated graph {i}")

    rows: list[tuple[str, float, float]] = []

    def add(name: str, values: Sequence[float]) -> None:
        arr = np.asarray(values, dtype=np.float64)
        rows.append((name, float(arr.mean()), float(arr.std())))

    for name, fn in STRUCTURAL_METRICS:
        add(name, [fn(g) for g in generated])
    add("degree_mmd", [degree_mmd(g, train) for g in generated])
    er_values = []
    for i, g in enumerate(generated):
        control = er_control_graph(train.n_nodes, g.n_edges, make_rng(seed, 4, i))
        er_values.append(degree_mmd(control, train))
    add("degree_mmd_er_control", er_values)
    add("eo_rate", [eo_rate(g, test) for g in generated])
    if len(generated) >= 2:
        rows.append(("uniqueness", uniqueness(list(generated)), 0.0))

    reference_dist = metapath_distribution(train, lengths, samples, make_rng(seed, 3))
    pooled: dict = {}
    distances: list[DistributionDistance] = []
    for i, g in enumerate(generated):
        dist = metapath_distribution(g, lengths, samples, make_rng(seed, 3, i))
        for p, c in dist.counts.items():
            pooled[p] = pooled.get(p, 0) + c
        distances.append(distribution_distance(dist, reference_dist))
    generated_dist = PatternDistribution(pooled, samples * len(generated))

    add("metapath_tv_overall", [d.tv_overall for d in distances])
    add("metapath_length_tv", [d.tv_length_marginal for d in distances])
    for l in sorted(lengths):
        values = [d.tv_by_length.get(l, 1.0) for d in distances]
        add(f"metapath_tv_len{l}", values)

    ref_rows = [(f"ref_{name}", float(fn(train))) for name, fn in STRUCTURAL_METRICS]

    hist_len = max(len(degree_histogram(train)), *(len(degree_histogram(g)) for g in generated))
    gen_hist = np.mean(
        [degree_histogram(g, hist_len) for g in generated], axis=0
    )
    return EvalReport(
        rows=rows,
        ref_rows=ref_rows,
        schema=train.schema,
        reference_dist=reference_dist,
        generated_dist=generated_dist,
        train_degree_hist=degree_histogram(train, hist_len),
        generated_degree_hist=gen_hist,
        per_graph_distance=distances,
    )


def _format_value(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def _pattern_block(fh, title: str, dist: PatternDistribution, schema: TypeSchema) -> None:
    fh.write(f"# pattern distribution: {title}\n")
    by_length: dict[int, list] = {}
    for pattern, prob in dist.probabilities.items():
        by_length.setdefault(pattern.length, []).append((pattern, prob))
    for length in sorted(by_length):
        fh.write(f"# length {length}\n")
        entries = sorted(by_length[length], key=lambda item: (-item[1], item[0].type_seq))
        for pattern, prob in entries:
            fh.write(f"{pattern.label(schema)}\t{_format_value(prob)}\n")


def write_report(report: EvalReport, path) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# metric\tmean\tstddev\n")
        for name, mean, std in report.rows:
            fh.write(f"{name}\t{_format_value(mean)}\t{_format_value(std)}\n")
        for name, value in report.ref_rows:
            fh.write(f"{name}\t{_format_value(value)}\t0.0\n")
        _pattern_block(fh, "reference (training graph)", report.reference_dist, report.schema)
        _pattern_block(fh, "generated (pooled)", report.generated_dist, report.schema)
