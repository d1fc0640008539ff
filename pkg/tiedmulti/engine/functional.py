"""Differentiable building blocks of the Transformer and the selector.

Each function takes and returns `Tensor`s; composite operations whose
backward has a compact closed form (softmax, layer norm, cross-entropy)
carry a fused backward instead of being built from primitives.
"""

from typing import Any

import numpy as np
from numpy.typing import NDArray
from scipy.special import expit, logsumexp

from tiedmulti.engine.tensor import Array, Tensor, add, matmul, take
from tiedmulti.utils.exceptions import NumericalError, ShapeError, VocabularyError

# Additive score for masked attention positions.
MASK_VALUE = -1e9
LAYER_NORM_EPS = 1e-6


def _check_finite(data: Array, what: str) -> None:
    if np.all(np.isfinite(data)):
        return
    rows = data.reshape(-1, data.shape[-1])
    bad = int(np.flatnonzero(~np.all(np.isfinite(rows), axis=-1))[0])
    raise NumericalError(f"{what}: non-finite value in row {bad}")


def softmax_rows(t: Tensor) -> Tensor:
    """Softmax over the last axis, stabilised by subtracting each row's maximum."""
    if t.ndim == 0 or t.shape[-1] == 0:
        raise ShapeError(f"softmax needs at least one column, got shape {t.shape}")
    _check_finite(t.data, "softmax")
    shifted = t.data - t.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=-1, keepdims=True)

    def _backward(g: Array) -> tuple[Array]:
        return (y * (g - (g * y).sum(axis=-1, keepdims=True)),)

    return Tensor.from_op(y, (t,), _backward, "softmax")


def log_softmax(t: Tensor) -> Tensor:
    """Log-probabilities over the last axis."""
    if t.ndim == 0 or t.shape[-1] == 0:
        raise ShapeError(f"log_softmax needs at least one column, got shape {t.shape}")
    _check_finite(t.data, "log_softmax")
    out = t.data - logsumexp(t.data, axis=-1, keepdims=True)

    def _backward(g: Array) -> tuple[Array]:
        return (g - np.exp(out) * g.sum(axis=-1, keepdims=True),)

    return Tensor.from_op(out, (t,), _backward, "log_softmax")


def cross_entropy(
    logits: Tensor,
    targets: NDArray[np.integer[Any]] | list[int],
    label_smoothing: float = 0.0,
    pad_id: int | None = 0,
) -> Tensor:
    """Mean label-smoothed negative log-likelihood over non-padding positions.

    The smoothed target distribution is `(1 - eps) * onehot + eps / V`.

    Args:
        logits: (..., V) unnormalised scores, one row per target position.
        targets: (...) token indices aligned with the rows of `logits`.
        label_smoothing: eps in [0, 1).
        pad_id: Target id whose positions are excluded; None keeps every position.

    Returns:
        Scalar tensor.
    """
    ids = np.asarray(targets, dtype=np.int64)
    vocab = logits.shape[-1]
    if ids.shape != logits.shape[:-1]:
        raise ShapeError(f"targets {ids.shape} do not align with logits {logits.shape}")
    if not 0.0 <= label_smoothing < 1.0:
        raise ValueError(f"label_smoothing must be in [0, 1), got {label_smoothing}")
    if ids.size and (ids.min() < 0 or ids.max() >= vocab):
        raise VocabularyError(f"target index outside vocabulary of {vocab}")
    mask = np.ones(ids.shape, dtype=bool) if pad_id is None else ids != pad_id
    count = int(mask.sum())
    if count == 0:
        raise ShapeError("cross_entropy: every target position is padding")
    _check_finite(logits.data, "cross_entropy")

    logp = logits.data - logsumexp(logits.data, axis=-1, keepdims=True)
    q = np.full(logits.shape, label_smoothing / vocab, dtype=logits.dtype)
    np.put_along_axis(q, ids[..., None], 1.0 - label_smoothing + label_smoothing / vocab, axis=-1)
    per_position = -(q * logp).sum(axis=-1)
    value = np.asarray((per_position * mask).sum() / count, dtype=logits.dtype)

    def _backward(g: Array) -> tuple[Array]:
        return (g * (np.exp(logp) - q) * mask[..., None] / count,)

    return Tensor.from_op(value, (logits,), _backward, "cross_entropy")


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = LAYER_NORM_EPS) -> Tensor:
    """Normalise over the last axis, then scale and shift."""
    mu = x.data.mean(axis=-1, keepdims=True)
    centred = x.data - mu
    rstd = 1.0 / np.sqrt((centred * centred).mean(axis=-1, keepdims=True) + eps)
    xhat = centred * rstd
    out = xhat * gain.data + bias.data
    lead = tuple(range(x.ndim - 1))

    def _backward(g: Array) -> tuple[Array, Array, Array]:
        gh = g * gain.data
        dx = rstd * (
            gh - gh.mean(axis=-1, keepdims=True) - xhat * (gh * xhat).mean(axis=-1, keepdims=True)
        )
        return dx, (g * xhat).sum(axis=lead), g.sum(axis=lead)

    return Tensor.from_op(out, (x, gain, bias), _backward, "layer_norm")


def embedding(table: Tensor, ids: NDArray[np.integer[Any]] | list[int]) -> Tensor:
    """Row lookup; repeated ids accumulate gradient into the same row."""
    index = np.asarray(ids, dtype=np.int64)
    if index.size and (index.min() < 0 or index.max() >= table.shape[0]):
        raise VocabularyError(f"token index outside vocabulary of {table.shape[0]}")
    return take(table, index)


def linear(x: Tensor, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    out = matmul(x, weight)
    return out if bias is None else add(out, bias)


def relu(x: Tensor) -> Tensor:
    active = x.data > 0
    return Tensor.from_op(np.where(active, x.data, 0.0), (x,), lambda g: (g * active,), "relu")


def sigmoid(x: Tensor) -> Tensor:
    y = expit(x.data)
    return Tensor.from_op(y, (x,), lambda g: (g * y * (1.0 - y),), "sigmoid")


def dropout(x: Tensor, rate: float, rng: np.random.Generator | None) -> Tensor:
    """Inverted dropout; identity when the rate is 0 or no generator is given."""
    if rate <= 0.0 or rng is None:
        return x
    keep = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return Tensor.from_op(x.data * keep, (x,), lambda g: (g * keep,), "dropout")


def causal_mask(length: int) -> Array:
    """(T, T) additive mask hiding future positions."""
    return np.triu(np.full((length, length), MASK_VALUE), k=1)


def padding_mask(ids: NDArray[np.integer[Any]], pad_id: int = 0) -> Array:
    """(..., 1, 1, S) additive mask hiding padded key positions from every head and query."""
    return np.where(ids == pad_id, MASK_VALUE, 0.0)[..., None, None, :]


def sinusoidal_positions(length: int, width: int) -> Array:
    """Fixed sine/cosine position table of shape (length, width)."""
    position = np.arange(length)[:, None]
    rate = np.exp(-np.log(10000.0) * (np.arange(0, width, 2) / width))
    table = np.zeros((length, width))
    table[:, 0::2] = np.sin(position * rate)
    table[:, 1::2] = np.cos(position * rate[: width // 2])
    return table
