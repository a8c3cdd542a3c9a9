"""Minimal reverse-mode automatic differentiation on a dynamic tape.

Tensors wrap float64 numpy arrays.  Operations are methods of :class:`Tape`;
each call computes the forward value and, when recording is on and any
input requires gradients, appends a backward rule.  :meth:`Tape.backward`
replays the rules in exact reverse execution order and accumulates
``d(loss)/d(tensor)`` into the ``grad`` field of every tensor that
requires gradients.

Supported shapes are the ones the recurrent models need: 1-D vectors,
2-D matrices, row-broadcast bias addition and column-broadcast masking.
Everything is float64 so finite-difference checks have headroom.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ContractError, ShapeMismatchError


class Tensor:
    __slots__ = ("data", "requires_grad", "grad")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad: Optional[np.ndarray] = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() on tensor of shape {self.data.shape}")
        return float(self.data.reshape(()))

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"


def constant(data) -> Tensor:
    return Tensor(data, requires_grad=False)


def parameter(data) -> Tensor:
    return Tensor(data, requires_grad=True)


# One record per executed op: output, inputs, and a rule mapping the
# output gradient to per-input gradients (None where no gradient flows).
_Record = tuple[Tensor, tuple[Tensor, ...], Callable[[np.ndarray], tuple]]


class Tape:
    """Ordered op record; single-threaded, one backward pass per graph."""

    def __init__(self, recording: bool = True):
        self.recording = recording
        self._records: list[_Record] = []

    def __len__(self) -> int:
        return len(self._records)

    # -- recording machinery -------------------------------------------------

    def _emit(self, out_data, inputs: Sequence[Tensor], backward) -> Tensor:
        track = self.recording and any(t.requires_grad for t in inputs)
        out = Tensor(out_data, requires_grad=track)
        if track:
            self._records.append((out, tuple(inputs), backward))
        return out

    def backward(self, loss: Tensor) -> None:
        """Accumulate ``d(loss)/d(leaf)`` into ``grad`` of requires_grad leaves."""
        if loss.data.size != 1:
            raise ContractError(f"loss must be scalar, got shape {loss.data.shape}")
        produced = {id(out) for out, _, _ in self._records}
        grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
        holders: dict[int, Tensor] = {id(loss): loss}
        for out, inputs, backward in reversed(self._records):
            g = grads.pop(id(out), None)
            if g is None:
                continue
            for tensor, piece in zip(inputs, backward(g)):
                if piece is None or not tensor.requires_grad:
                    continue
                key = id(tensor)
                if key in grads:
                    grads[key] = grads[key] + piece
                else:
                    grads[key] = piece
                    holders[key] = tensor
        for key, g in grads.items():
            if key in produced:
                continue  # intermediate values do not keep gradients
            tensor = holders[key]
            if tensor.grad is None:
                tensor.grad = np.array(g, dtype=np.float64)
            else:
                tensor.grad += g

    # -- linear algebra -------------------------------------------------------

    def matmul(self, a: Tensor, b: Tensor) -> Tensor:
        ad, bd = a.data, b.data
        if ad.ndim not in (1, 2) or bd.ndim not in (1, 2):
            raise ShapeMismatchError("matmul", ad.shape, bd.shape)
        if ad.shape[-1] != (bd.shape[0] if bd.ndim > 0 else -1):
            raise ShapeMismatchError("matmul", ad.shape, bd.shape)
        out = ad @ bd

        def backward(g):
            a2 = ad.reshape(1, -1) if ad.ndim == 1 else ad
            b2 = bd.reshape(-1, 1) if bd.ndim == 1 else bd
            g2 = g.reshape(a2.shape[0], b2.shape[1])
            da = (g2 @ b2.T).reshape(ad.shape) if a.requires_grad else None
            db = (a2.T @ g2).reshape(bd.shape) if b.requires_grad else None
            return da, db

        return self._emit(out, (a, b), backward)

    def add(self, a: Tensor, b: Tensor) -> Tensor:
        da_sum, db_sum = self._broadcast_axes("add", a.data.shape, b.data.shape)

        def backward(g):
            da = self._reduce(g, a.data.shape, da_sum) if a.requires_grad else None
            db = self._reduce(g, b.data.shape, db_sum) if b.requires_grad else None
            return da, db

        return self._emit(a.data + b.data, (a, b), backward)

    def sub(self, a: Tensor, b: Tensor) -> Tensor:
        da_sum, db_sum = self._broadcast_axes("sub", a.data.shape, b.data.shape)

        def backward(g):
            da = self._reduce(g, a.data.shape, da_sum) if a.requires_grad else None
            db = -self._reduce(g, b.data.shape, db_sum) if b.requires_grad else None
            return da, db

        return self._emit(a.data - b.data, (a, b), backward)

    def mul(self, a: Tensor, b: Tensor) -> Tensor:
        da_sum, db_sum = self._broadcast_axes("mul", a.data.shape, b.data.shape)
        ad, bd = a.data, b.data

        def backward(g):
            da = self._reduce(g * bd, ad.shape, da_sum) if a.requires_grad else None
            db = self._reduce(g * ad, bd.shape, db_sum) if b.requires_grad else None
            return da, db

        return self._emit(ad * bd, (a, b), backward)

    @staticmethod
    def _broadcast_axes(op, sa, sb):
        """Allowed pairs: identical shapes, (m,n)·(n,) rows, (m,n)·(m,1) columns."""
        if sa == sb:
            return None, None
        if len(sa) == 2 and sb == (sa[1],):
            return None, (0, False)
        if len(sb) == 2 and sa == (sb[1],):
            return (0, False), None
        if len(sa) == 2 and sb == (sa[0], 1):
            return None, (1, True)
        if len(sb) == 2 and sa == (sb[0], 1):
            return (1, True), None
        raise ShapeMismatchError(op, sa, sb)

    @staticmethod
    def _reduce(g, target_shape, spec):
        if spec is None:
            return g if g.shape == target_shape else g.reshape(target_shape)
        axis, keepdims = spec
        return g.sum(axis=axis, keepdims=keepdims)

    def neg(self, a: Tensor) -> Tensor:
        return self._emit(-a.data, (a,), lambda g: (-g,))

    def scale(self, a: Tensor, c: float) -> Tensor:
        c = float(c)
        return self._emit(a.data * c, (a,), lambda g: (g * c,))

    def concat(self, parts: Sequence[Tensor], axis: int = -1) -> Tensor:
        datas = [p.data for p in parts]
        nd = datas[0].ndim
        if any(d.ndim != nd for d in datas):
            raise ShapeMismatchError("concat", *[d.shape for d in datas])
        out = np.concatenate(datas, axis=axis)
        widths = [d.shape[axis] for d in datas]
        splits = np.cumsum(widths)[:-1]

        def backward(g):
            pieces = np.split(g, splits, axis=axis)
            return tuple(p if t.requires_grad else None for p, t in zip(pieces, parts))

        return self._emit(out, tuple(parts), backward)

    # -- nonlinearities ---------------------------------------------------------

    def tanh(self, a: Tensor) -> Tensor:
        y = np.tanh(a.data)
        return self._emit(y, (a,), lambda g: (g * (1.0 - y * y),))

    def sigmoid(self, a: Tensor) -> Tensor:
        y = 1.0 / (1.0 + np.exp(-a.data))
        return self._emit(y, (a,), lambda g: (g * y * (1.0 - y),))

    def exp(self, a: Tensor) -> Tensor:
        y = np.exp(a.data)
        return self._emit(y, (a,), lambda g: (g * y,))

    def log(self, a: Tensor) -> Tensor:
        return self._emit(np.log(a.data), (a,), lambda g: (g / a.data,))

    def softmax(self, a: Tensor) -> Tensor:
        shifted = a.data - a.data.max(axis=-1, keepdims=True)
        e = np.exp(shifted)
        y = e / e.sum(axis=-1, keepdims=True)

        def backward(g):
            dot = (g * y).sum(axis=-1, keepdims=True)
            return (y * (g - dot),)

        return self._emit(y, (a,), backward)

    # -- reductions ---------------------------------------------------------

    def sum(self, a: Tensor, axis: Optional[int] = None) -> Tensor:
        if axis is None:
            out = a.data.sum()
            return self._emit(out, (a,), lambda g: (np.broadcast_to(g, a.data.shape).copy(),))
        out = a.data.sum(axis=axis)

        def backward(g):
            return (np.broadcast_to(np.expand_dims(g, axis), a.data.shape).copy(),)

        return self._emit(out, (a,), backward)

    def mean(self, a: Tensor) -> Tensor:
        inv = 1.0 / a.data.size
        out = a.data.mean()
        return self._emit(
            out, (a,), lambda g: (np.broadcast_to(g * inv, a.data.shape).copy(),)
        )

    # -- shape and batch plumbing --------------------------------------------

    def reshape(self, a: Tensor, shape: tuple[int, ...]) -> Tensor:
        if int(np.prod(shape)) != a.data.size:
            raise ShapeMismatchError("reshape", a.data.shape, shape)
        return self._emit(a.data.reshape(shape), (a,), lambda g: (g.reshape(a.data.shape),))

    def take_rows(self, a: Tensor, indices) -> Tensor:
        """Gather rows of a 2-D tensor; backward scatter-adds into place."""
        if a.data.ndim != 2:
            raise ShapeMismatchError("take_rows", a.data.shape)
        idx = np.asarray(indices, dtype=np.int64)

        def backward(g):
            out = np.zeros_like(a.data)
            np.add.at(out, idx, g)
            return (out,)

        return self._emit(a.data[idx], (a,), backward)

    def expand_rows(self, a: Tensor, indices, total_rows: int) -> Tensor:
        """Scatter rows of a 2-D tensor into a zero matrix of ``total_rows`` rows."""
        if a.data.ndim != 2:
            raise ShapeMismatchError("expand_rows", a.data.shape)
        idx = np.asarray(indices, dtype=np.int64)
        out = np.zeros((total_rows, a.data.shape[1]))
        out[idx] = a.data
        return self._emit(out, (a,), lambda g: (g[idx],))

    # -- estimator glue -----------------------------------------------------

    def straight_through(self, soft: Tensor, hard_data) -> Tensor:
        """Forward the discrete value, route gradients to the relaxed input."""
        hard = np.asarray(hard_data, dtype=np.float64)
        if hard.shape != soft.data.shape:
            raise ShapeMismatchError("straight_through", soft.data.shape, hard.shape)
        return self._emit(hard, (soft,), lambda g: (g,))
