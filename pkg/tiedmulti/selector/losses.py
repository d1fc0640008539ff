"""Training losses of the layer-combination classifier.

All losses take `yhat` as a (B, K) or (K,) tensor of sigmoid outputs and
`y` as the matching 0/1 label array.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from tiedmulti.config.experiment import SelectorConfig
from tiedmulti.engine.tensor import Tensor, clip, log
from tiedmulti.utils.exceptions import ConfigurationError, ShapeError

CLAMP = 1e-12


@dataclass
class ClassWeights:
    """delta_k = (1 - p(t_k)) ** alpha, with p(t_k) the label frequency of class k."""

    delta: NDArray[np.float64]
    priors: NDArray[np.float64]
    alpha: float


def class_weights(
    label_counts: Sequence[int] | NDArray[np.integer[Any]], alpha: float
) -> ClassWeights:
    counts = np.asarray(label_counts, dtype=np.float64)
    if np.any(counts < 0):
        raise ConfigurationError("label counts must be non-negative")
    total = counts.sum()
    if total == 0:
        raise ConfigurationError("class weights need at least one positive label")
    priors = counts / total
    return ClassWeights(delta=(1.0 - priors) ** alpha, priors=priors, alpha=alpha)


def _as_rows(yhat: Tensor, y: ArrayLike) -> tuple[Tensor, NDArray[np.float64]]:
    labels = np.asarray(y, dtype=np.float64)
    if labels.shape != yhat.shape:
        raise ShapeError(f"labels {labels.shape} do not match predictions {yhat.shape}")
    if yhat.ndim == 1:
        return yhat.reshape(1, -1), labels.reshape(1, -1)
    return yhat, labels


def weighted_bce(
    yhat: Tensor,
    y: ArrayLike,
    weights: ClassWeights,
    sample_weights: ArrayLike | None = None,
) -> Tensor:
    """-w * [delta_k * y_k * log yhat_k + (1 - y_k) * log(1 - yhat_k)], mean over K then batch."""
    probs, labels = _as_rows(yhat, y)
    B, K = labels.shape
    if weights.delta.shape != (K,):
        raise ShapeError(f"{weights.delta.size} class weights for {K} classes")
    w = np.ones(B) if sample_weights is None else np.asarray(sample_weights, dtype=np.float64)
    safe = clip(probs, CLAMP, 1.0 - CLAMP)
    positive = log(safe) * (weights.delta * labels)
    negative = log(1.0 - safe) * (1.0 - labels)
    per_class = (positive + negative) * (-w[:, None])
    return per_class.mean(axis=1).mean()


def f_beta_loss(yhat: Tensor, y: ArrayLike, beta: float) -> Tensor:
    """1 - F_beta with soft counts, per example, averaged over the batch.

    With mu = sum(yhat * y), P = mu / sum(yhat) and R = mu / sum(y) the
    F-measure reduces to (1 + beta^2) mu / (beta^2 sum(y) + sum(yhat)),
    which is 0 (loss 1) when mu = 0 or sum(yhat) = 0.
    """
    probs, labels = _as_rows(yhat, y)
    positives = labels.sum(axis=1)
    if np.any(positives < 1):
        raise ShapeError("every example needs at least one positive label")
    b2 = beta * beta
    mu = (probs * labels).sum(axis=1)
    denominator = probs.sum(axis=1) + b2 * positives
    f = mu * (1.0 + b2) / denominator
    return 1.0 - f.mean()


def selector_loss(
    yhat: Tensor,
    y: ArrayLike,
    config: SelectorConfig,
    weights: ClassWeights,
    sample_weights: ArrayLike | None = None,
) -> Tensor:
    """lambda * weighted BCE + (1 - lambda) * F_beta loss."""
    lam = config.interpolation
    bce = weighted_bce(yhat, y, weights, sample_weights)
    fb = f_beta_loss(yhat, y, config.beta)
    if lam == 1.0:
        return bce
    if lam == 0.0:
        return fb
    return bce * lam + fb * (1.0 - lam)
