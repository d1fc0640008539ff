"""Dense tensors with reverse-mode gradient tracking.

A `Tensor` wraps a NumPy array. Operations on tensors that require gradients
record their inputs and a backward closure; `backward()` orders the recorded
graph topologically into a `GradTape` and replays it once in reverse.
"""

import threading
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from typing import Any, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from tiedmulti.core.kinds import Precision
from tiedmulti.utils.exceptions import ShapeError

Array = NDArray[np.floating[Any]]
BackwardFn = Callable[[Array], Sequence[Array | None]]
Operand = Union["Tensor", ArrayLike]

_state = threading.local()
_default_dtype: type[np.floating[Any]] = np.float64


def grad_enabled() -> bool:
    """Whether new operations are recorded for backward (per thread)."""
    return bool(getattr(_state, "grad_enabled", True))


@contextmanager
def no_grad() -> Iterator[None]:
    """Run operations without recording them; used by decoding."""
    previous = grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


def set_precision(precision: Precision) -> None:
    """Select the dtype new leaf tensors are created with."""
    global _default_dtype
    _default_dtype = np.float32 if precision == Precision.FLOAT32 else np.float64


def default_dtype() -> type[np.floating[Any]]:
    return _default_dtype


class Tensor:
    """A node in the computation graph."""

    __slots__ = ("_backward", "_parents", "data", "grad", "op", "requires_grad")

    def __init__(
        self,
        data: ArrayLike,
        *,
        requires_grad: bool = False,
        dtype: type[np.floating[Any]] | np.dtype[Any] | None = None,
    ) -> None:
        self.data: Array = np.asarray(data, dtype=dtype or _default_dtype)
        self.grad: Array | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward: BackwardFn | None = None
        self.op = "leaf"

    @classmethod
    def from_op(
        cls,
        data: Array,
        parents: tuple["Tensor", ...],
        backward: BackwardFn,
        op: str,
    ) -> "Tensor":
        """Wrap the result of an operation, recording it when gradients are needed."""
        out = cls.__new__(cls)
        out.data = data
        out.grad = None
        out.op = op
        track = grad_enabled() and any(p.requires_grad for p in parents)
        out.requires_grad = track
        out._parents = parents if track else ()
        out._backward = backward if track else None
        return out

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return int(self.data.ndim)

    @property
    def dtype(self) -> np.dtype[Any]:
        return self.data.dtype

    @property
    def is_leaf(self) -> bool:
        return self._backward is None

    def item(self) -> float:
        return float(self.data)

    def numpy(self) -> Array:
        return self.data

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def detach(self) -> "Tensor":
        return Tensor(self.data, dtype=self.data.dtype)

    def backward(self) -> "GradTape":
        return backward(self)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, op={self.op}, requires_grad={self.requires_grad})"

    # Operators delegate to the module-level functions below.
    def __add__(self, other: Operand) -> "Tensor":
        return add(self, other)

    def __radd__(self, other: Operand) -> "Tensor":
        return add(other, self)

    def __sub__(self, other: Operand) -> "Tensor":
        return sub(self, other)

    def __rsub__(self, other: Operand) -> "Tensor":
        return sub(other, self)

    def __mul__(self, other: Operand) -> "Tensor":
        return mul(self, other)

    def __rmul__(self, other: Operand) -> "Tensor":
        return mul(other, self)

    def __truediv__(self, other: Operand) -> "Tensor":
        return div(self, other)

    def __rtruediv__(self, other: Operand) -> "Tensor":
        return div(other, self)

    def __neg__(self) -> "Tensor":
        return neg(self)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        return matmul(self, other)

    def __getitem__(self, index: Any) -> "Tensor":
        return take(self, index)

    def sum(self, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> "Tensor":
        return tensor_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> "Tensor":
        return tensor_mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape: int) -> "Tensor":
        return reshape(self, shape)

    def swapaxes(self, a: int, b: int) -> "Tensor":
        return swapaxes(self, a, b)


class GradTape:
    """Topologically ordered record of the operations that produced an output."""

    def __init__(self, output: Tensor, nodes: list[Tensor]) -> None:
        self.output = output
        self.nodes = nodes
        self.visits = 0

    @classmethod
    def record(cls, output: Tensor) -> "GradTape":
        """Collect every tracked ancestor of `output`, parents before children."""
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(output, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in reversed(node._parents):
                if parent.requires_grad and id(parent) not in seen:
                    stack.append((parent, False))
        return cls(output, order)

    def replay(self, seed: Array | None = None) -> None:
        """Propagate gradients from the output back to every recorded node exactly once."""
        pending: dict[int, Array] = {
            id(self.output): np.ones_like(self.output.data) if seed is None else seed
        }
        for node in reversed(self.nodes):
            self.visits += 1
            grad = pending.pop(id(node), None)
            if grad is None:
                grad = np.zeros_like(node.data)
            if node.is_leaf:
                node.grad = grad.copy() if node.grad is None else node.grad + grad
                continue
            node.grad = grad
            assert node._backward is not None
            for parent, parent_grad in zip(node._parents, node._backward(grad), strict=True):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                pending[key] = pending[key] + parent_grad if key in pending else parent_grad


def backward(loss: Tensor) -> GradTape:
    """Populate `.grad` on every tensor that contributed to the scalar `loss`."""
    if loss.ndim != 0:
        raise ShapeError(f"backward needs a scalar loss, got shape {loss.shape}")
    tape = GradTape.record(loss)
    if loss.requires_grad:
        tape.replay()
    return tape


def lift(value: Operand, like: Tensor | None = None) -> Tensor:
    """Wrap constants as non-tracked tensors matching the dtype of `like`."""
    if isinstance(value, Tensor):
        return value
    dtype = like.dtype if like is not None else None
    return Tensor(value, dtype=dtype)


def unbroadcast(grad: Array, shape: tuple[int, ...]) -> Array:
    """Sum out the dimensions NumPy broadcasting added or stretched."""
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _pair(a: Operand, b: Operand) -> tuple[Tensor, Tensor]:
    if isinstance(a, Tensor):
        return a, lift(b, a)
    if isinstance(b, Tensor):
        return lift(a, b), b
    return lift(a), lift(b)


def add(a: Operand, b: Operand) -> Tensor:
    x, y = _pair(a, b)

    def _backward(g: Array) -> tuple[Array, Array]:
        return unbroadcast(g, x.shape), unbroadcast(g, y.shape)

    return Tensor.from_op(x.data + y.data, (x, y), _backward, "add")


def sub(a: Operand, b: Operand) -> Tensor:
    x, y = _pair(a, b)

    def _backward(g: Array) -> tuple[Array, Array]:
        return unbroadcast(g, x.shape), unbroadcast(-g, y.shape)

    return Tensor.from_op(x.data - y.data, (x, y), _backward, "sub")


def mul(a: Operand, b: Operand) -> Tensor:
    x, y = _pair(a, b)

    def _backward(g: Array) -> tuple[Array, Array]:
        return unbroadcast(g * y.data, x.shape), unbroadcast(g * x.data, y.shape)

    return Tensor.from_op(x.data * y.data, (x, y), _backward, "mul")


def div(a: Operand, b: Operand) -> Tensor:
    x, y = _pair(a, b)

    def _backward(g: Array) -> tuple[Array, Array]:
        return (
            unbroadcast(g / y.data, x.shape),
            unbroadcast(-g * x.data / (y.data * y.data), y.shape),
        )

    return Tensor.from_op(x.data / y.data, (x, y), _backward, "div")


def neg(a: Tensor) -> Tensor:
    return Tensor.from_op(-a.data, (a,), lambda g: (-g,), "neg")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Batched matrix product with NumPy broadcasting over leading axes."""
    if a.ndim < 2 or b.ndim < 2:
        raise ShapeError(f"matmul needs matrices, got {a.shape} @ {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(f"matmul inner extents differ: {a.shape} @ {b.shape}")

    def _backward(g: Array) -> tuple[Array, Array]:
        ga = g @ np.swapaxes(b.data, -1, -2)
        gb = np.swapaxes(a.data, -1, -2) @ g
        return unbroadcast(ga, a.shape), unbroadcast(gb, b.shape)

    return Tensor.from_op(a.data @ b.data, (a, b), _backward, "matmul")


def tensor_sum(
    a: Tensor, axis: int | tuple[int, ...] | None = None, keepdims: bool = False
) -> Tensor:
    def _backward(g: Array) -> tuple[Array]:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return Tensor.from_op(
        np.asarray(a.data.sum(axis=axis, keepdims=keepdims)), (a,), _backward, "sum"
    )


def tensor_mean(
    a: Tensor, axis: int | tuple[int, ...] | None = None, keepdims: bool = False
) -> Tensor:
    total = tensor_sum(a, axis=axis, keepdims=keepdims)
    count = a.data.size // max(total.data.size, 1)
    return mul(total, 1.0 / count)


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    original = a.shape
    return Tensor.from_op(
        a.data.reshape(tuple(shape)), (a,), lambda g: (g.reshape(original),), "reshape"
    )


def swapaxes(a: Tensor, first: int, second: int) -> Tensor:
    return Tensor.from_op(
        np.swapaxes(a.data, first, second),
        (a,),
        lambda g: (np.swapaxes(g, first, second),),
        "swapaxes",
    )


def take(a: Tensor, index: Any) -> Tensor:
    """Basic or advanced indexing; repeated indices accumulate in backward."""

    def _backward(g: Array) -> tuple[Array]:
        out = np.zeros_like(a.data)
        np.add.at(out, index, g)
        return (out,)

    return Tensor.from_op(np.asarray(a.data[index]), (a,), _backward, "take")


def concat(tensors: Sequence[Tensor], axis: int) -> Tensor:
    extents = [t.shape[axis] for t in tensors]
    splits = np.cumsum(extents)[:-1]

    def _backward(g: Array) -> list[Array]:
        return list(np.split(g, splits, axis=axis))

    data = np.concatenate([t.data for t in tensors], axis=axis)
    return Tensor.from_op(data, tuple(tensors), _backward, "concat")


def exp(a: Tensor) -> Tensor:
    out = np.exp(a.data)
    return Tensor.from_op(out, (a,), lambda g: (g * out,), "exp")


def log(a: Tensor) -> Tensor:
    return Tensor.from_op(np.log(a.data), (a,), lambda g: (g / a.data,), "log")


def clip(a: Tensor, low: float, high: float) -> Tensor:
    """Clamp values; gradient passes only where the input was inside [low, high]."""
    inside = (a.data >= low) & (a.data <= high)
    return Tensor.from_op(np.clip(a.data, low, high), (a,), lambda g: (g * inside,), "clip")
