"""Recurrent heterogeneous walk generator, parallel critic, adversarial training.

The generator runs an LSTM seeded from projected Gaussian noise.  At each
step it decodes a node type through a Gumbel-softmax head (one extra slot
is the end-of-sequence token), maps the hidden state plus the type one-hot
to a query point in embedding space, and draws the concrete node from a
softmax over negative squared distances to all same-type node embeddings.
The critic scores the node-type sequence and the node-embedding sequence
with two independent recurrent tracks and adds the two scalars.

Training follows the weight-clipped Wasserstein recipe: several critic
ascent steps per generator step, RMSProp updates, all critic weights
clamped to [-clip, +clip] after each update.  Gradients reach the
generator through straight-through estimators over both the relaxed type
sample and the node-selection weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .autodiff import Tape, Tensor, constant
from .embedding import EmbeddingTable, train_embeddings
from .errors import (
    ContractError,
    GenerationError,
    ParameterError,
    TrainingError,
)
from .graph import HetGraph, TypeSchema
from .nn import (
    DenseParams,
    LstmParams,
    RmsProp,
    clip_tensors,
    gumbel_softmax,
    init_dense,
    init_lstm,
    lstm_step,
    lstm_step_raw,
    one_hot,
    softmax_raw,
)
from .walks import HeteroWalk, sample_corpus

_RESAMPLE_LIMIT = 10  # retries when a sampled type has no member nodes


def _empty_type_mask(table: EmbeddingTable, n_node_types: int) -> np.ndarray:
    """Boolean flag per type slot (EOS included, always False) for empty classes."""
    mask = np.zeros(n_node_types + 1, dtype=bool)
    for t in range(n_node_types):
        mask[t] = len(table.by_type.get(t, ())) == 0
    return mask


@dataclass
class GeneratorParams:
    noise_dim: int
    hidden_dim: int
    embed_dim: int
    n_node_types: int
    n_edge_types: int
    f0: DenseParams  # noise -> initial memory
    lstm: LstmParams  # recurrent core over fused (type, node) inputs
    g_o: DenseParams  # hidden -> node-type logits, last slot is EOS
    g_v: DenseParams  # hidden ++ type one-hot -> embedding-space query
    g_c: DenseParams  # type one-hot ++ node embedding -> recurrent input
    g_e: DenseParams  # both endpoint (type, embedding) pairs -> edge-type logits
    # Per-coordinate bound of the tanh-saturated query head.  Keeps queries
    # inside the embedding cloud: an unbounded query inflates adversarially,
    # sharpening the selection softmax until straight-through gradients die.
    query_scale: float = 1.0

    @property
    def type_slots(self) -> int:
        return self.n_node_types + 1

    @property
    def recur_dim(self) -> int:
        return self.embed_dim

    def tensors(self) -> list[tuple[str, Tensor]]:
        out = []
        for part in (self.f0, self.lstm, self.g_o, self.g_v, self.g_c, self.g_e):
            out.extend(part.tensors())
        return out

    def trainable(self) -> list[Tensor]:
        return [t for _, t in self.tensors()]


@dataclass
class DiscriminatorParams:
    hidden_dim: int
    type_lstm: LstmParams
    type_head: DenseParams
    node_lstm: LstmParams
    node_head: DenseParams

    def tensors(self) -> list[tuple[str, Tensor]]:
        out = []
        for part in (self.type_lstm, self.type_head, self.node_lstm, self.node_head):
            out.extend(part.tensors())
        return out

    def trainable(self) -> list[Tensor]:
        return [t for _, t in self.tensors()]


def init_generator(
    schema: TypeSchema,
    embed_dim: int,
    noise_dim: int,
    hidden_dim: int,
    rng: np.random.Generator,
    query_scale: float = 1.0,
) -> GeneratorParams:
    k = schema.n_node_types + 1
    return GeneratorParams(
        noise_dim=noise_dim,
        hidden_dim=hidden_dim,
        embed_dim=embed_dim,
        n_node_types=schema.n_node_types,
        n_edge_types=schema.n_edge_types,
        f0=init_dense("gen.f0", noise_dim, hidden_dim, rng),
        lstm=init_lstm("gen.lstm", embed_dim, hidden_dim, rng),
        g_o=init_dense("gen.g_o", hidden_dim, k, rng),
        g_v=init_dense("gen.g_v", hidden_dim + k, embed_dim, rng),
        g_c=init_dense("gen.g_c", k + embed_dim, embed_dim, rng),
        g_e=init_dense("gen.g_e", 2 * (k + embed_dim), max(schema.n_edge_types, 1), rng),
        query_scale=float(query_scale),
    )


def query_scale_for(table: EmbeddingTable) -> float:
    """Per-coordinate query bound: the embedding cloud's coordinate RMS."""
    norms = np.linalg.norm(table.vectors, axis=1)
    median = float(np.median(norms))
    if median <= 0:
        return 1.0
    return median / np.sqrt(table.dim)


def init_discriminator(
    schema: TypeSchema, embed_dim: int, hidden_dim: int, rng: np.random.Generator
) -> DiscriminatorParams:
    k = schema.n_node_types + 1
    return DiscriminatorParams(
        hidden_dim=hidden_dim,
        type_lstm=init_lstm("disc.type_lstm", k, hidden_dim, rng),
        type_head=init_dense("disc.type_head", hidden_dim, 1, rng),
        node_lstm=init_lstm("disc.node_lstm", embed_dim, hidden_dim, rng),
        node_head=init_dense("disc.node_head", hidden_dim, 1, rng),
    )


# ---------------------------------------------------------------------------
# Walk generation: fast batched sampling (no tape)
# ---------------------------------------------------------------------------


def generate_walks(
    gen: GeneratorParams,
    table: EmbeddingTable,
    schema: TypeSchema,
    count: int,
    max_len: int,
    temperature: float,
    rng: np.random.Generator,
    uniform_nodes: bool = False,
    type_logits_hook: Optional[Callable[[int, np.ndarray], np.ndarray]] = None,
) -> list[HeteroWalk]:
    """Sample ``count`` walks in one vectorized pass.

    ``type_logits_hook(step, logits)`` is a diagnostic hook that may replace
    the type logits at a given step (used by determinism harnesses).
    """
    if max_len < 2:
        raise ParameterError("max_len must allow at least 2 nodes")
    if count < 1:
        raise ParameterError("count must be >= 1")
    k = gen.type_slots
    eos = gen.n_node_types

    z = rng.standard_normal((count, gen.noise_dim))
    m = gen.f0.apply_raw(z)
    a = np.zeros((count, gen.recur_dim))
    walk_nodes: list[list[int]] = [[] for _ in range(count)]
    walk_types: list[list[int]] = [[] for _ in range(count)]
    alive = np.arange(count)
    type_empty = _empty_type_mask(table, gen.n_node_types)

    for step in range(max_len):
        m, h = lstm_step_raw(gen.lstm, m, a)
        logits = gen.g_o.apply_raw(h)
        if type_logits_hook is not None:
            logits = type_logits_hook(step, logits)
        if step < 2:
            logits = logits.copy()
            logits[:, eos] = -1e9  # a walk carries at least one edge
        noise = rng.gumbel(size=logits.shape)
        t_idx = np.argmax((logits + noise) / temperature, axis=1)

        attempts = 0
        while True:
            bad = np.flatnonzero((t_idx != eos) & type_empty[t_idx])
            if len(bad) == 0:
                break
            if attempts >= _RESAMPLE_LIMIT:
                raise GenerationError("sampled node type has no member nodes after retries")
            redraw = rng.gumbel(size=(len(bad), k))
            t_idx[bad] = np.argmax((logits[bad] + redraw) / temperature, axis=1)
            attempts += 1

        cont = np.flatnonzero(t_idx != eos)
        if len(cont) == 0:
            alive = np.array([], dtype=int)
            break

        cont_types = t_idx[cont]
        h_cont = h[cont]
        onehots = np.zeros((len(cont), k))
        onehots[np.arange(len(cont)), cont_types] = 1.0
        queries = gen.query_scale * np.tanh(
            gen.g_v.apply_raw(np.concatenate([h_cont, onehots], axis=1))
        )

        u = rng.random(len(cont))
        chosen = np.empty(len(cont), dtype=np.int64)
        emb_next = np.empty((len(cont), gen.embed_dim))
        for t in np.unique(cont_types):
            rows = np.flatnonzero(cont_types == t)
            members = table.type_members(int(t))
            mat = table.type_matrix(int(t))
            diff = queries[rows][:, None, :] - mat[None, :, :]
            d2 = np.einsum("rkd,rkd->rk", diff, diff)
            if uniform_nodes:
                weights = np.full_like(d2, 1.0 / d2.shape[1])
            else:
                weights = softmax_raw(-d2)
            cdf = np.cumsum(weights, axis=1)
            pick = np.minimum(
                (cdf < u[rows, None]).sum(axis=1), len(members) - 1
            )
            chosen[rows] = members[pick]
            emb_next[rows] = table.vectors[members[pick]]

        for r, w_idx in enumerate(alive[cont]):
            walk_nodes[w_idx].append(int(chosen[r]))
            walk_types[w_idx].append(int(cont_types[r]))

        a = gen.g_c.apply_raw(np.concatenate([onehots, emb_next], axis=1))
        m = m[cont]
        alive = alive[cont]

    return [
        _finish_walk(gen, table, schema, nodes, types)
        for nodes, types in zip(walk_nodes, walk_types)
    ]


def generate_walk(
    gen: GeneratorParams,
    table: EmbeddingTable,
    schema: TypeSchema,
    max_len: int,
    temperature: float,
    rng: np.random.Generator,
    uniform_nodes: bool = False,
) -> HeteroWalk:
    return generate_walks(gen, table, schema, 1, max_len, temperature, rng, uniform_nodes)[0]


def _finish_walk(gen, table, schema, nodes, types) -> HeteroWalk:
    edge_types = []
    for i in range(1, len(nodes)):
        rule_t = schema.rule_lookup(types[i - 1], types[i])
        if rule_t is not None:
            edge_types.append(rule_t)
        else:
            edge_types.append(_edge_type_logits_raw(gen, table, types[i], nodes[i],
                                                    types[i - 1], nodes[i - 1]).argmax())
    return HeteroWalk(tuple(nodes), tuple(types), tuple(int(t) for t in edge_types))


def _edge_type_logits_raw(gen, table, t_cur, v_cur, t_prev, v_prev) -> np.ndarray:
    k = gen.type_slots
    x = np.concatenate([
        one_hot(t_cur, k), table.vectors[v_cur],
        one_hot(t_prev, k), table.vectors[v_prev],
    ])
    return gen.g_e.apply_raw(x)


# ---------------------------------------------------------------------------
# Walk generation: traced per-sample pass (training path)
# ---------------------------------------------------------------------------


@dataclass
class TracedWalk:
    nodes: list[int]
    types: list[int]
    type_inputs: list[Tensor]  # straight-through one-hots incl. the EOS position
    node_inputs: list[Tensor]  # straight-through selected embeddings


def trace_walk(
    tape: Tape,
    gen: GeneratorParams,
    table: EmbeddingTable,
    schema: TypeSchema,
    max_len: int,
    temperature: float,
    rng: np.random.Generator,
    uniform_nodes: bool = False,
    relaxed: bool = False,
) -> TracedWalk:
    """Generate one walk on the tape; discrete forward, relaxed backward.

    With ``relaxed=True`` the straight-through substitution is skipped and
    the soft tensors themselves flow forward.  That mode makes the whole
    pass an ordinary differentiable function of the parameters (for fixed
    noise), which is what finite-difference oracles check; training uses
    the default discrete forward whose backward rules are identical.
    """
    k = gen.type_slots
    eos = gen.n_node_types
    eos_block = np.zeros(k)
    eos_block[eos] = -1e9

    z = constant(rng.standard_normal(gen.noise_dim))
    m = gen.f0.apply(tape, z)
    a = constant(np.zeros(gen.recur_dim))
    out = TracedWalk([], [], [], [])

    for step in range(max_len):
        m, h = lstm_step(tape, gen.lstm, m, a)
        logits = gen.g_o.apply(tape, h)
        if step < 2:
            logits = tape.add(logits, constant(eos_block))
        soft_type, idx = gumbel_softmax(tape, logits, temperature, rng)
        attempts = 0
        while idx != eos and len(table.by_type.get(idx, ())) == 0:
            if attempts >= _RESAMPLE_LIMIT:
                raise GenerationError("sampled node type has no member nodes after retries")
            soft_type, idx = gumbel_softmax(tape, logits, temperature, rng)
            attempts += 1

        if idx == eos:
            out.type_inputs.append(
                soft_type if relaxed else tape.straight_through(soft_type, one_hot(eos, k))
            )
            return out

        type_st = soft_type if relaxed else tape.straight_through(soft_type, one_hot(idx, k))
        query = tape.scale(tape.tanh(gen.g_v.apply(tape, tape.concat([h, type_st]))),
                           gen.query_scale)
        members = table.type_members(idx)
        cand = constant(table.type_matrix(idx))
        diff = tape.sub(cand, query)
        d2 = tape.sum(tape.mul(diff, diff), axis=1)
        if uniform_nodes:
            weights = constant(np.full(len(members), 1.0 / len(members)))
        else:
            weights = tape.softmax(tape.neg(d2))
        u = rng.random()
        j = min(int(np.searchsorted(np.cumsum(weights.data), u, side="right")),
                len(members) - 1)
        soft_emb = tape.matmul(weights, cand)
        emb_st = soft_emb if relaxed else tape.straight_through(
            soft_emb, table.vectors[members[j]]
        )

        out.nodes.append(int(members[j]))
        out.types.append(idx)
        out.type_inputs.append(type_st)
        out.node_inputs.append(emb_st)
        a = gen.g_c.apply(tape, tape.concat([type_st, emb_st]))

    # Ran to max_len without emitting EOS: close the type sequence with a
    # constant marker so real and generated encodings stay comparable.
    out.type_inputs.append(constant(one_hot(eos, k)))
    return out


@dataclass
class TracedBatch:
    """Batched straight-through generation: per-position tensors plus masks."""

    nodes: list[list[int]]
    types: list[list[int]]
    type_inputs: list[Tensor]  # max_len + 1 tensors of shape (B, n_types + 1)
    type_masks: list[Tensor]
    node_inputs: list[Tensor]  # max_len tensors of shape (B, embed_dim)
    node_masks: list[Tensor]


def trace_batch(
    tape: Tape,
    gen: GeneratorParams,
    table: EmbeddingTable,
    schema: TypeSchema,
    batch_size: int,
    max_len: int,
    temperature: float,
    rng: np.random.Generator,
    uniform_nodes: bool = False,
    relaxed: bool = False,
) -> TracedBatch:
    """Vectorized counterpart of :func:`trace_walk` over a whole batch.

    All rows run the full ``max_len`` steps; rows that emitted EOS keep
    computing on masked-out garbage so every step works on fixed shapes.
    Row draws are independent, so per-walk distributions match the
    per-sample path even though the consumption order differs.
    """
    k = gen.type_slots
    eos = gen.n_node_types
    b = batch_size
    eos_block = np.zeros(k)
    eos_block[eos] = -1e9
    type_empty = _empty_type_mask(table, gen.n_node_types)

    z = constant(rng.standard_normal((b, gen.noise_dim)))
    m = gen.f0.apply(tape, z)
    a = constant(np.zeros((b, gen.recur_dim)))
    finished = np.full(b, -1, dtype=np.int64)  # EOS position; -1 while alive
    out = TracedBatch([[] for _ in range(b)], [[] for _ in range(b)], [], [], [], [])

    for step in range(max_len):
        m, h = lstm_step(tape, gen.lstm, m, a)
        logits = gen.g_o.apply(tape, h)
        if step < 2:
            logits = tape.add(logits, constant(eos_block))
        noise = rng.gumbel(size=(b, k))
        soft_types = tape.softmax(
            tape.scale(tape.add(logits, constant(noise)), 1.0 / temperature)
        )
        hard = np.argmax(soft_types.data, axis=1)

        attempts = 0
        while True:
            bad = np.flatnonzero((finished < 0) & (hard != eos) & type_empty[hard])
            if len(bad) == 0:
                break
            if attempts >= _RESAMPLE_LIMIT:
                raise GenerationError("sampled node type has no member nodes after retries")
            redraw = rng.gumbel(size=(len(bad), k))
            hard[bad] = np.argmax((logits.data[bad] + redraw) / temperature, axis=1)
            attempts += 1
        hard[finished >= 0] = eos  # dead rows stay on the EOS token

        hard_mat = np.zeros((b, k))
        hard_mat[np.arange(b), hard] = 1.0
        type_st = soft_types if relaxed else tape.straight_through(soft_types, hard_mat)
        out.type_inputs.append(type_st)
        finished[np.flatnonzero((finished < 0) & (hard == eos))] = step

        cont = np.flatnonzero(hard != eos)
        emb_b: Tensor
        if len(cont) > 0:
            queries = tape.scale(
                tape.tanh(gen.g_v.apply(tape, tape.concat([h, type_st], axis=1))),
                gen.query_scale,
            )
            u = rng.random(len(cont))
            cont_types = hard[cont]
            pieces = []
            for t in sorted(set(int(x) for x in cont_types)):
                local = np.flatnonzero(cont_types == t)
                rows = cont[local]
                members = table.type_members(t)
                mat = table.type_matrix(t)
                q = tape.take_rows(queries, rows)
                # squared distances via |q|^2 - 2 q E^T + |e|^2
                cross = tape.matmul(q, constant(mat.T))
                qsq = tape.reshape(tape.sum(tape.mul(q, q), axis=1), (len(rows), 1))
                esq = constant(np.einsum("kd,kd->k", mat, mat))
                d2 = tape.add(tape.add(tape.scale(cross, -2.0), qsq), esq)
                if uniform_nodes:
                    weights = constant(np.full(d2.data.shape, 1.0 / len(members)))
                else:
                    weights = tape.softmax(tape.neg(d2))
                cdf = np.cumsum(weights.data, axis=1)
                pick = np.minimum((cdf < u[local, None]).sum(axis=1), len(members) - 1)
                chosen = members[pick]
                soft = tape.matmul(weights, constant(mat))
                st = soft if relaxed else tape.straight_through(soft, table.vectors[chosen])
                pieces.append(tape.expand_rows(st, rows, b))
                for r, node in zip(rows, chosen):
                    out.nodes[r].append(int(node))
                    out.types[r].append(t)
            emb_b = pieces[0]
            for piece in pieces[1:]:
                emb_b = tape.add(emb_b, piece)
        else:
            emb_b = constant(np.zeros((b, gen.embed_dim)))
        out.node_inputs.append(emb_b)
        a = gen.g_c.apply(tape, tape.concat([type_st, emb_b], axis=1))

    # Closing EOS position for rows that ran the full length.
    closing = np.zeros((b, k))
    closing[:, eos] = 1.0
    out.type_inputs.append(constant(closing))

    n_nodes = np.where(finished >= 0, finished, max_len)
    positions = np.arange(max_len + 1)[:, None]
    type_mask = (positions <= n_nodes[None, :]).astype(np.float64)
    node_mask = (positions[:-1] < n_nodes[None, :]).astype(np.float64)
    out.type_masks = [constant(type_mask[p][:, None]) for p in range(max_len + 1)]
    out.node_masks = [constant(node_mask[p][:, None]) for p in range(max_len)]
    return out


# ---------------------------------------------------------------------------
# Critic scoring
# ---------------------------------------------------------------------------


def _run_track(tape, lstm_params, head, inputs: Sequence[Tensor], hidden_dim, masks=None):
    """Run one recurrent track; returns the scalar head on the final state."""
    first = inputs[0].data
    state_shape = (first.shape[0], hidden_dim) if first.ndim == 2 else (hidden_dim,)
    m = constant(np.zeros(state_shape))
    h_final = constant(np.zeros(state_shape))
    for pos, x in enumerate(inputs):
        m_new, h = lstm_step(tape, lstm_params, m, x)
        if masks is None:
            m, h_final = m_new, h
        else:
            keep = masks[pos]
            drop = constant(1.0 - keep.data)
            m = tape.add(tape.mul(m_new, keep), tape.mul(m, drop))
            h_final = tape.add(tape.mul(h, keep), tape.mul(h_final, drop))
    return head.apply(tape, h_final)


def score_walk_traced(
    tape: Tape,
    disc: DiscriminatorParams,
    type_inputs: Sequence[Tensor],
    node_inputs: Sequence[Tensor],
) -> Tensor:
    s_type = _run_track(tape, disc.type_lstm, disc.type_head, type_inputs, disc.hidden_dim)
    s_node = _run_track(tape, disc.node_lstm, disc.node_head, node_inputs, disc.hidden_dim)
    return tape.sum(tape.add(s_type, s_node))


def encode_walk_inputs(walk: HeteroWalk, table: EmbeddingTable, n_node_types: int):
    """Discrete walk -> (type one-hots incl. EOS marker, node embedding rows)."""
    k = n_node_types + 1
    type_inputs = [constant(one_hot(t, k)) for t in walk.type_seq]
    type_inputs.append(constant(one_hot(n_node_types, k)))
    node_inputs = [constant(table.vectors[v]) for v in walk.node_seq]
    return type_inputs, node_inputs


def score_walk(disc: DiscriminatorParams, walk: HeteroWalk, table: EmbeddingTable) -> float:
    """Critic score of a concrete walk (validation path, no gradients)."""
    if len(walk.node_seq) < 2:
        raise ContractError("walks scored by the critic need at least 2 nodes")
    tape = Tape(recording=False)
    type_inputs, node_inputs = encode_walk_inputs(walk, table, disc.type_lstm.input_dim - 1)
    return score_walk_traced(tape, disc, type_inputs, node_inputs).item()


def _encode_batch(walks: Sequence[HeteroWalk], table: EmbeddingTable, n_node_types: int,
                  max_nodes: int):
    """Pad a walk batch to fixed-position constant tensors with masks.

    The type track sees every node type plus an EOS marker at position n;
    padding positions repeat the EOS one-hot but are masked out.  The node
    track sees embeddings over node positions, zero-padded and masked.
    """
    b = len(walks)
    k = n_node_types + 1
    t_steps = max_nodes + 1
    type_arr = np.zeros((t_steps, b, k))
    type_mask = np.zeros((t_steps, b, 1))
    node_arr = np.zeros((max_nodes, b, table.dim))
    node_mask = np.zeros((max_nodes, b, 1))
    type_arr[:, :, n_node_types] = 1.0  # padding default: EOS slot
    for col, walk in enumerate(walks):
        n = len(walk.node_seq)
        if n > max_nodes:
            raise ContractError(f"walk has {n} nodes, batch allows {max_nodes}")
        for pos, t in enumerate(walk.type_seq):
            type_arr[pos, col, :] = 0.0
            type_arr[pos, col, t] = 1.0
        type_mask[: n + 1, col, 0] = 1.0
        for pos, v in enumerate(walk.node_seq):
            node_arr[pos, col, :] = table.vectors[v]
        node_mask[:n, col, 0] = 1.0
    type_inputs = [constant(type_arr[p]) for p in range(t_steps)]
    type_masks = [constant(type_mask[p]) for p in range(t_steps)]
    node_inputs = [constant(node_arr[p]) for p in range(max_nodes)]
    node_masks = [constant(node_mask[p]) for p in range(max_nodes)]
    return type_inputs, type_masks, node_inputs, node_masks


def score_batch(
    tape: Tape,
    disc: DiscriminatorParams,
    walks: Sequence[HeteroWalk],
    table: EmbeddingTable,
    n_node_types: int,
    max_nodes: int,
) -> Tensor:
    """Mean critic score over a batch of concrete walks (differentiable in D)."""
    type_inputs, type_masks, node_inputs, node_masks = _encode_batch(
        walks, table, n_node_types, max_nodes
    )
    s_type = _run_track(tape, disc.type_lstm, disc.type_head, type_inputs,
                        disc.hidden_dim, masks=type_masks)
    s_node = _run_track(tape, disc.node_lstm, disc.node_head, node_inputs,
                        disc.hidden_dim, masks=node_masks)
    return tape.mean(tape.add(s_type, s_node))


# ---------------------------------------------------------------------------
# Adversarial updates
# ---------------------------------------------------------------------------


def critic_step(
    gen: GeneratorParams,
    disc: DiscriminatorParams,
    real_batch: Sequence[HeteroWalk],
    table: EmbeddingTable,
    clip: float,
    lr: float,
    rng: np.random.Generator,
    schema: TypeSchema,
    max_len: int,
    temperature: float,
    opt: Optional[RmsProp] = None,
    uniform_nodes: bool = False,
) -> float:
    """One ascent step on E[D(real)] - E[D(fake)]; weights clamped afterwards."""
    if not real_batch:
        raise ParameterError("real batch must be non-empty")
    if clip <= 0:
        raise ParameterError("clip must be > 0")
    fake_batch = generate_walks(
        gen, table, schema, len(real_batch), max_len, temperature, rng,
        uniform_nodes=uniform_nodes,
    )
    tape = Tape()
    real_mean = score_batch(tape, disc, real_batch, table, gen.n_node_types, max_len)
    fake_mean = score_batch(tape, disc, fake_batch, table, gen.n_node_types, max_len)
    loss = tape.sub(fake_mean, real_mean)  # descend the negated objective
    value = loss.item()
    if not np.isfinite(value):
        raise TrainingError("critic loss is not finite")
    tape.backward(loss)
    (opt or RmsProp()).step(disc.trainable(), lr)
    clip_tensors(disc.trainable(), clip)
    return value


def generator_step(
    gen: GeneratorParams,
    disc: DiscriminatorParams,
    batch_size: int,
    table: EmbeddingTable,
    lr: float,
    temperature: float,
    rng: np.random.Generator,
    schema: TypeSchema,
    max_len: int,
    opt: Optional[RmsProp] = None,
    uniform_nodes: bool = False,
    real_batch: Optional[Sequence[HeteroWalk]] = None,
    edge_loss_weight: float = 1.0,
    lr_node: Optional[float] = None,
) -> float:
    """One descent step on -E[D(G(z))]; the critic is left untouched.

    When the schema has no total edge-type rule and ``real_batch`` is given,
    an auxiliary cross-entropy on the edge-type head against real edge
    types is added with ``edge_loss_weight``.  ``lr_node`` (default ``lr``)
    is applied to the node-query head only; the query position drifts much
    faster than the selection softmax can correct it, so it usually wants
    a smaller rate than the type-side parameters.
    """
    if batch_size < 1:
        raise ParameterError("batch_size must be >= 1")
    tape = Tape()
    traced = trace_batch(tape, gen, table, schema, batch_size, max_len, temperature, rng,
                         uniform_nodes=uniform_nodes)
    s_type = _run_track(tape, disc.type_lstm, disc.type_head, traced.type_inputs,
                        disc.hidden_dim, masks=traced.type_masks)
    s_node = _run_track(tape, disc.node_lstm, disc.node_head, traced.node_inputs,
                        disc.hidden_dim, masks=traced.node_masks)
    loss = tape.scale(tape.mean(tape.add(s_type, s_node)), -1.0)

    if real_batch is not None and schema.edge_type_rule is None:
        aux = _edge_type_loss(tape, gen, table, real_batch)
        if aux is not None:
            loss = tape.add(loss, tape.scale(aux, edge_loss_weight))

    value = loss.item()
    if not np.isfinite(value):
        raise TrainingError("generator loss is not finite")
    tape.backward(loss)
    optimizer = opt or RmsProp()
    node_head = {id(t) for _, t in gen.g_v.tensors()}
    optimizer.step([t for t in gen.trainable() if id(t) not in node_head], lr)
    optimizer.step([t for _, t in gen.g_v.tensors()], lr if lr_node is None else lr_node)
    return value


def _edge_type_loss(tape, gen, table, real_batch) -> Optional[Tensor]:
    """Mean cross-entropy of the edge-type head on real consecutive pairs."""
    k = gen.type_slots
    terms = []
    for walk in real_batch:
        for i in range(1, len(walk.node_seq)):
            x = constant(np.concatenate([
                one_hot(walk.type_seq[i], k), table.vectors[walk.node_seq[i]],
                one_hot(walk.type_seq[i - 1], k), table.vectors[walk.node_seq[i - 1]],
            ]))
            logits = gen.g_e.apply(tape, x)
            shifted = tape.sub(logits, constant(np.full(logits.data.shape, logits.data.max())))
            target = constant(one_hot(walk.edge_type_seq[i - 1], logits.data.shape[0]))
            lse = tape.log(tape.sum(tape.exp(shifted)))
            terms.append(tape.sub(lse, tape.sum(tape.mul(target, shifted))))
    if not terms:
        return None
    total = terms[0]
    for t in terms[1:]:
        total = tape.add(total, t)
    return tape.scale(total, 1.0 / len(terms))


# ---------------------------------------------------------------------------
# Training loop
# ---------------------------------------------------------------------------


@dataclass
class TrainLogEntry:
    step: int
    critic_loss: float
    generator_loss: float


class _WeightAverage:
    """Exponential moving average over generator weights.

    Adversarial training cycles around its equilibrium at this scale; the
    averaged iterate sits near the cycle center, which is what generation
    and checkpoints should use.
    """

    def __init__(self, params: GeneratorParams, decay: float):
        self.decay = decay
        self.shadow = {name: t.data.copy() for name, t in params.tensors()}

    def update(self, params: GeneratorParams) -> None:
        for name, t in params.tensors():
            s = self.shadow[name]
            s *= self.decay
            s += (1.0 - self.decay) * t.data

    def apply(self, params: GeneratorParams) -> None:
        for name, t in params.tensors():
            t.data = self.shadow[name].copy()


@dataclass
class TrainResult:
    generator: GeneratorParams
    discriminator: DiscriminatorParams
    embeddings: EmbeddingTable
    log: list[TrainLogEntry] = field(default_factory=list)


def train(
    graph: HetGraph,
    config,
    rng: np.random.Generator,
    checkpoint_path=None,
    progress: Optional[Callable[[TrainLogEntry], None]] = None,
) -> TrainResult:
    """Full pipeline: embedding pretraining, then alternating W-GAN updates.

    ``config`` is a :class:`hetnetgen.config.TrainConfig`; ablation flags are
    applied through ``config.resolved()``.  When ``checkpoint_path`` is set,
    a checkpoint is written every ``checkpoint_interval`` steps and on abort.
    """
    from .modelio import save_model  # local import to avoid a cycle

    if graph.n_edges == 0:
        raise ParameterError("training graph has no edges")
    cfg = config.resolved()

    corpus = sample_corpus(graph, cfg.embed_walks, {cfg.embed_walk_length}, rng)
    table = train_embeddings(
        corpus, graph,
        dim=cfg.embed_dim, window=cfg.embed_window, negatives=cfg.embed_negatives,
        epochs=cfg.embed_epochs, lr=cfg.embed_lr, rng=rng,
    )
    if cfg.embed_normalize:
        table = table.normalized()
    gen = init_generator(graph.schema, cfg.embed_dim, cfg.noise_dim, cfg.hidden_dim, rng,
                         query_scale=query_scale_for(table))
    disc = init_discriminator(graph.schema, cfg.embed_dim, cfg.hidden_dim, rng)
    gen_opt, disc_opt = RmsProp(), RmsProp()
    average = _WeightAverage(gen, cfg.ema_decay) if cfg.ema_decay > 0 else None
    result = TrainResult(gen, disc, table, [])

    def save(path):
        if average is None:
            save_model(path, gen, disc, table, graph, cfg)
            return
        live = {name: t.data for name, t in gen.tensors()}
        average.apply(gen)
        save_model(path, gen, disc, table, graph, cfg)
        for name, t in gen.tensors():
            t.data = live[name]

    try:
        for step in range(1, cfg.steps + 1):
            critic_losses = []
            for _ in range(cfg.n_critic):
                real = sample_corpus(graph, cfg.batch_size, cfg.walk_lengths, rng)
                critic_losses.append(critic_step(
                    gen, disc, real, table, cfg.clip, cfg.lr_disc, rng,
                    graph.schema, cfg.max_len, cfg.temperature,
                    opt=disc_opt, uniform_nodes=cfg.uniform_node_sampling,
                ))
            aux_real = None
            if graph.schema.edge_type_rule is None:
                aux_real = sample_corpus(graph, min(cfg.batch_size, 32), cfg.walk_lengths, rng)
            gen_loss = generator_step(
                gen, disc, cfg.batch_size, table, cfg.lr_gen, cfg.temperature, rng,
                graph.schema, cfg.max_len,
                opt=gen_opt, uniform_nodes=cfg.uniform_node_sampling,
                real_batch=aux_real, lr_node=cfg.lr_gen_node,
            )
            if average is not None:
                average.update(gen)
            entry = TrainLogEntry(step, float(np.mean(critic_losses)), gen_loss)
            result.log.append(entry)
            if progress is not None:
                progress(entry)
            if checkpoint_path is not None and cfg.checkpoint_interval > 0 \
                    and step % cfg.checkpoint_interval == 0:
                save(checkpoint_path)
    except TrainingError:
        if checkpoint_path is not None:
            save(checkpoint_path)
        raise
    if average is not None:
        average.apply(gen)
    if checkpoint_path is not None:
        save(checkpoint_path)
    return result
