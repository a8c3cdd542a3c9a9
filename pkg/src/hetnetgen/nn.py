"""Neural building blocks: dense layers, an LSTM cell, Gumbel-softmax, RMSProp.

The LSTM follows the single-recurrent-state convention used by the walk
generator: the cell memory ``m`` is the only carried state, gates read the
concatenation of the step input and the previous memory, and the hidden
output ``h`` is produced fresh each step as ``o * tanh(m)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import Tape, Tensor, constant, parameter
from .errors import ParameterError


@dataclass
class DenseParams:
    name: str
    w: Tensor  # (fan_in, fan_out)
    b: Tensor  # (fan_out,)

    def apply(self, tape: Tape, x: Tensor) -> Tensor:
        return tape.add(tape.matmul(x, self.w), self.b)

    def apply_raw(self, x: np.ndarray) -> np.ndarray:
        return x @ self.w.data + self.b.data

    def tensors(self) -> list[tuple[str, Tensor]]:
        return [(f"{self.name}.w", self.w), (f"{self.name}.b", self.b)]


def init_dense(name: str, fan_in: int, fan_out: int, rng: np.random.Generator) -> DenseParams:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    w = parameter(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
    b = parameter(np.zeros(fan_out))
    return DenseParams(name, w, b)


@dataclass
class LstmParams:
    """Gate weights for input/forget/output/candidate, (input+hidden) -> hidden."""

    name: str
    input_dim: int
    hidden_dim: int
    w_i: Tensor
    w_f: Tensor
    w_o: Tensor
    w_g: Tensor
    b_i: Tensor
    b_f: Tensor
    b_o: Tensor
    b_g: Tensor

    def tensors(self) -> list[tuple[str, Tensor]]:
        return [(f"{self.name}.{k}", getattr(self, k)) for k in
                ("w_i", "w_f", "w_o", "w_g", "b_i", "b_f", "b_o", "b_g")]


def init_lstm(name: str, input_dim: int, hidden_dim: int, rng: np.random.Generator) -> LstmParams:
    fan = input_dim + hidden_dim
    limit = np.sqrt(6.0 / (fan + hidden_dim))

    def mat():
        return parameter(rng.uniform(-limit, limit, size=(fan, hidden_dim)))

    # Forget bias starts at 1 so early training does not wipe the memory.
    return LstmParams(
        name, input_dim, hidden_dim,
        w_i=mat(), w_f=mat(), w_o=mat(), w_g=mat(),
        b_i=parameter(np.zeros(hidden_dim)),
        b_f=parameter(np.ones(hidden_dim)),
        b_o=parameter(np.zeros(hidden_dim)),
        b_g=parameter(np.zeros(hidden_dim)),
    )


def lstm_step(tape: Tape, params: LstmParams, m_prev: Tensor, a_prev: Tensor):
    """One recurrent step; returns (memory, hidden).  Works on vectors or batches."""
    z = tape.concat([a_prev, m_prev], axis=-1)
    i = tape.sigmoid(tape.add(tape.matmul(z, params.w_i), params.b_i))
    f = tape.sigmoid(tape.add(tape.matmul(z, params.w_f), params.b_f))
    o = tape.sigmoid(tape.add(tape.matmul(z, params.w_o), params.b_o))
    g = tape.tanh(tape.add(tape.matmul(z, params.w_g), params.b_g))
    m = tape.add(tape.mul(f, m_prev), tape.mul(i, g))
    h = tape.mul(o, tape.tanh(m))
    return m, h


def lstm_step_raw(params: LstmParams, m_prev: np.ndarray, a_prev: np.ndarray):
    """Tape-free twin of :func:`lstm_step` for fast batched sampling."""
    z = np.concatenate([a_prev, m_prev], axis=-1)
    i = _sigmoid(z @ params.w_i.data + params.b_i.data)
    f = _sigmoid(z @ params.w_f.data + params.b_f.data)
    o = _sigmoid(z @ params.w_o.data + params.b_o.data)
    g = np.tanh(z @ params.w_g.data + params.b_g.data)
    m = f * m_prev + i * g
    h = o * np.tanh(m)
    return m, h


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def softmax_raw(x: np.ndarray) -> np.ndarray:
    e = np.exp(x - x.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def gumbel_softmax(tape: Tape, logits: Tensor, temperature: float, rng: np.random.Generator):
    """Relaxed categorical sample; returns (relaxed probabilities, argmax index).

    Gradients flow through the relaxed vector; discrete consumers use the
    hard index (straight-through contract is assembled by the caller via
    ``tape.straight_through``).
    """
    if temperature <= 0:
        raise ParameterError("temperature must be > 0")
    if logits.data.ndim != 1:
        raise ParameterError("gumbel_softmax expects 1-D logits")
    noise = rng.gumbel(size=logits.data.shape)
    relaxed = tape.softmax(tape.scale(tape.add(logits, constant(noise)), 1.0 / temperature))
    hard_index = int(np.argmax(relaxed.data))
    return relaxed, hard_index


def one_hot(index: int, size: int) -> np.ndarray:
    v = np.zeros(size)
    v[index] = 1.0
    return v


class RmsProp:
    """Per-parameter adaptive step with decay 0.9; consumes and clears grads."""

    def __init__(self, decay: float = 0.9, eps: float = 1e-8):
        self.decay = decay
        self.eps = eps
        self._cache: dict[int, np.ndarray] = {}

    def step(self, params: list[Tensor], lr: float) -> None:
        for p in params:
            if p.grad is None:
                continue
            cache = self._cache.get(id(p))
            if cache is None:
                cache = np.zeros_like(p.data)
                self._cache[id(p)] = cache
            cache *= self.decay
            cache += (1.0 - self.decay) * p.grad * p.grad
            p.data -= lr * p.grad / (np.sqrt(cache) + self.eps)
            p.grad = None


def clip_tensors(params: list[Tensor], bound: float) -> None:
    """Clamp every entry into [-bound, +bound] in place."""
    if bound <= 0:
        raise ParameterError("clip bound must be > 0")
    for p in params:
        np.clip(p.data, -bound, bound, out=p.data)
