"""Immutable float64 tensors and the reverse-mode tape.

A ``Tensor`` is a dense, row-major float64 array whose buffer is marked
read-only.  Running ``apply`` inside a ``with Tape() as tape:`` block
records a node per operation; ``backward(tape, root)`` then accumulates
chain-rule gradients for every recorded node.  A tape belongs to one
thread of execution; parallel work should use one tape per worker.
"""
from __future__ import annotations

import threading

import numpy as np

from . import ops
from .ops import DomainError, ShapeError, registered_kinds  # noqa: F401  (re-export)


class Tensor:
    """Dense float64 value; shape may have rank 0 to 3."""

    __slots__ = ("data", "_tape", "_node")

    def __init__(self, data):
        arr = np.array(data, dtype=np.float64, order="C")
        arr.setflags(write=False)
        self.data = arr
        self._tape = None
        self._node = -1

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "Tensor":
        # Adopt a freshly computed array without copying.
        out = cls.__new__(cls)
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim > 0 and not arr.flags["C_CONTIGUOUS"]:
            arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        out.data = arr
        out._tape = None
        out._node = -1
        return out

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def __repr__(self):
        return f"Tensor({np.array2string(self.data, threshold=8)})"

    def __add__(self, other):
        return apply("add", self, other)

    def __radd__(self, other):
        return apply("add", other, self)

    def __sub__(self, other):
        return apply("sub", self, other)

    def __rsub__(self, other):
        return apply("sub", other, self)

    def __mul__(self, other):
        return apply("mul", self, other)

    def __rmul__(self, other):
        return apply("mul", other, self)

    def __truediv__(self, other):
        return apply("div", self, other)

    def __rtruediv__(self, other):
        return apply("div", other, self)

    def __matmul__(self, other):
        return apply("matmul", self, other)

    def __neg__(self):
        return apply("neg", self)


class _Node:
    __slots__ = ("kind", "inputs", "value", "params")

    def __init__(self, kind, inputs, value, params):
        self.kind = kind
        self.inputs = inputs
        self.value = value
        self.params = params


_ACTIVE = threading.local()


def _stack() -> list:
    stack = getattr(_ACTIVE, "stack", None)
    if stack is None:
        stack = _ACTIVE.stack = []
    return stack


def active_tape():
    stack = _stack()
    return stack[-1] if stack else None


class Tape:
    """Append-only operation record; inputs always precede their users."""

    def __init__(self):
        self.nodes: list[_Node] = []

    def __enter__(self) -> "Tape":
        _stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        popped = _stack().pop()
        assert popped is self, "tape context exited out of order"
        return False

    def __len__(self):
        return len(self.nodes)

    def watch(self, tensor: Tensor) -> int:
        """Register a tensor as a leaf node and return its node id."""
        if tensor._tape is self:
            return tensor._node
        nid = self._record("leaf", (), tensor.data, {})
        tensor._tape = self
        tensor._node = nid
        return nid

    def _record(self, kind, inputs, value, params) -> int:
        self.nodes.append(_Node(kind, inputs, value, params))
        return len(self.nodes) - 1

    def replay(self) -> list:
        """Recompute every node's forward value from its recorded inputs.

        Returns the list of recomputed arrays; a healthy tape reproduces
        node values bit-exactly.
        """
        values = []
        for node in self.nodes:
            if node.kind == "leaf":
                values.append(node.value)
            else:
                args = tuple(values[i] for i in node.inputs)
                values.append(ops.KERNELS[node.kind].forward(*args, **node.params))
        return values


def apply(kind: str, *inputs, **params) -> Tensor:
    """Run the registered operation ``kind`` on the inputs.

    Non-Tensor inputs are coerced.  When a tape is active the result is
    recorded as a new node (inputs are auto-registered as leaves).
    """
    try:
        kernel = ops.KERNELS[kind]
    except KeyError:
        raise KeyError(f"unknown operation kind {kind!r}") from None
    tensors = [x if isinstance(x, Tensor) else Tensor(x) for x in inputs]
    out = Tensor._wrap(kernel.forward(*(t.data for t in tensors), **params))
    tape = active_tape()
    if tape is not None:
        ids = tuple(tape.watch(t) for t in tensors)
        out._tape = tape
        out._node = tape._record(kind, ids, out.data, params)
    return out


def backward(tape: Tape, root: Tensor) -> dict:
    """Reverse sweep from a scalar root node.

    Returns a map node id -> gradient Tensor covering every node on the
    tape; nodes the root does not depend on get zero gradients, and the
    root's own gradient is 1.
    """
    if root._tape is not tape or root._node < 0:
        raise ValueError("backward root is not recorded on this tape")
    if root.data.size != 1:
        raise ValueError(f"backward root must be scalar, got shape {root.shape}")
    nodes = tape.nodes
    grads = [np.zeros_like(node.value) for node in nodes]
    grads[root._node] = np.ones_like(nodes[root._node].value)
    for i in range(root._node, -1, -1):
        node = nodes[i]
        if node.kind == "leaf" or not grads[i].any():
            continue
        args = tuple(nodes[j].value for j in node.inputs)
        input_grads = ops.KERNELS[node.kind].backward(grads[i], node.value, *args, **node.params)
        for j, g in zip(node.inputs, input_grads):
            grads[j] = grads[j] + g
    return {i: Tensor._wrap(g) for i, g in enumerate(grads)}
