"""Save/load of trained models on top of the shared checkpoint container.

A model checkpoint carries the generator, discriminator and embedding
tensors, the node-type assignment of the training graph, the type schema
(labels and edge-type rule), and the effective training configuration, so
that generation and assembly can run from the file alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import parameter
from .checkpoint import read_checkpoint, write_checkpoint
from .config import TrainConfig
from .embedding import EmbeddingTable
from .errors import GraphFormatError
from .gan import DiscriminatorParams, GeneratorParams, init_discriminator, init_generator
from .graph import HetGraph, TypeSchema


@dataclass
class ModelBundle:
    generator: GeneratorParams
    discriminator: DiscriminatorParams
    table: EmbeddingTable
    schema: TypeSchema
    node_types: np.ndarray
    config: TrainConfig
    train_edges: int


def _encode_rule(schema: TypeSchema) -> str:
    if schema.edge_type_rule is None:
        return ""
    parts = [f"{a},{b}:{t}" for (a, b), t in sorted(schema.edge_type_rule.items())]
    return ";".join(parts)


def _decode_rule(text: str):
    if not text:
        return None
    rule = {}
    for part in text.split(";"):
        pair, t = part.split(":")
        a, b = pair.split(",")
        rule[(int(a), int(b))] = int(t)
    return rule


def save_model(
    path,
    gen: GeneratorParams,
    disc: DiscriminatorParams,
    table: EmbeddingTable,
    graph: HetGraph,
    config: TrainConfig,
) -> None:
    header = {
        "node_type_labels": ",".join(graph.schema.node_type_labels),
        "edge_type_labels": ",".join(graph.schema.edge_type_labels),
        "edge_type_rule": _encode_rule(graph.schema),
        "noise_dim": gen.noise_dim,
        "hidden_dim": gen.hidden_dim,
        "embed_dim": gen.embed_dim,
        "query_scale": repr(gen.query_scale),
        "max_len": config.max_len,
        "temperature": config.temperature,
        "train_edges": graph.n_edges,
    }
    for line in config.to_text().strip().split("\n"):
        key, value = line.split("=", 1)
        header[f"config.{key}"] = value
    tensors = [(name, t.data) for name, t in gen.tensors()]
    tensors += [(name, t.data) for name, t in disc.tensors()]
    tensors.append(("embed.vectors", table.vectors))
    tensors.append(("graph.node_types", graph.node_types.astype(np.float64)))
    write_checkpoint(path, header, tensors)


def load_model(path) -> ModelBundle:
    header, tensors = read_checkpoint(path)
    try:
        schema = TypeSchema(
            tuple(header["node_type_labels"].split(",")),
            tuple(header["edge_type_labels"].split(",")),
            _decode_rule(header.get("edge_type_rule", "")),
        )
        config = TrainConfig.from_mapping({
            key[len("config."):]: value
            for key, value in header.items() if key.startswith("config.")
        })
        noise_dim = int(header["noise_dim"])
        hidden_dim = int(header["hidden_dim"])
        embed_dim = int(header["embed_dim"])
        query_scale = float(header.get("query_scale", "1.0"))
        train_edges = int(header["train_edges"])
    except KeyError as exc:
        raise GraphFormatError(path, 1, f"checkpoint missing header field {exc}") from exc

    node_types = tensors["graph.node_types"].astype(np.int64)
    by_type = {
        t: np.flatnonzero(node_types == t)
        for t in range(schema.n_node_types)
        if np.any(node_types == t)
    }
    table = EmbeddingTable(dim=embed_dim, vectors=tensors["embed.vectors"], by_type=by_type)

    rng = np.random.default_rng(0)  # shapes only; weights overwritten below
    gen = init_generator(schema, embed_dim, noise_dim, hidden_dim, rng,
                         query_scale=query_scale)
    disc = init_discriminator(schema, embed_dim, hidden_dim, rng)
    for name, tensor in gen.tensors() + disc.tensors():
        if name not in tensors:
            raise GraphFormatError(path, 1, f"checkpoint missing tensor {name!r}")
        if tensors[name].shape != tensor.data.shape:
            raise GraphFormatError(
                path, 1,
                f"tensor {name!r} has shape {tensors[name].shape}, expected {tensor.data.shape}",
            )
        tensor.data = tensors[name]
    return ModelBundle(gen, disc, table, schema, node_types, config, train_edges)
