"""Training objectives for vanilla and tied-multi models."""

from dataclasses import dataclass

import numpy as np

from tiedmulti.core.kinds import Aggregation
from tiedmulti.engine.functional import cross_entropy
from tiedmulti.engine.tensor import Array, Tensor
from tiedmulti.model.transformer import Parameters, decode_states, encode_all, project
from tiedmulti.training.batching import Batch
from tiedmulti.utils.exceptions import ConfigurationError


@dataclass
class LossGrid:
    """loss_{i,j} for every encoder depth i and decoder depth j, plus their aggregate."""

    values: Array
    overall: Tensor

    @property
    def overall_value(self) -> float:
        return self.overall.item()

    def row_major(self) -> list[float]:
        """Per-combination losses with the decoder index varying fastest."""
        return [float(v) for v in self.values.reshape(-1)]


def tied_multi_loss(
    batch: Batch,
    params: Parameters,
    label_smoothing: float = 0.0,
    aggregation: Aggregation = Aggregation.MEAN,
    weights: Array | None = None,
    rng: np.random.Generator | None = None,
) -> LossGrid:
    """N x M cross-entropy losses from one encoder pass.

    Each encoder layer runs once; for every encoder depth i the decoder
    stack runs once against enc_i and all of its M states are projected.
    Terms with weight 0 stay in `values` but are left out of `overall`.

    Args:
        batch: Padded sentence pairs.
        params: Model weights.
        label_smoothing: Smoothing applied to every term.
        aggregation: MEAN averages all terms; WEIGHTED uses `weights`.
        weights: (N, M) non-negative term weights.
        rng: Dropout generator.

    Returns:
        The loss grid with a differentiable `overall`.
    """
    N, M = params.config.enc_layers, params.config.dec_layers
    if aggregation == Aggregation.MEAN and weights is None:
        weights = np.ones((N, M))
    if weights is None or weights.shape != (N, M):
        raise ConfigurationError(f"loss weights must have shape ({N}, {M})")
    if np.any(weights < 0) or not np.any(weights > 0):
        raise ConfigurationError("loss weights must be non-negative with at least one positive")

    values = np.zeros((N, M))
    total: Tensor | None = None
    enc = encode_all(batch.src, params, rng=rng)
    for i in range(1, N + 1):
        dec = decode_states(batch.tgt_in, enc[i], params, M, enc.key_mask, rng=rng)
        for j in range(1, M + 1):
            loss_ij = cross_entropy(project(dec[j - 1], params), batch.tgt_out, label_smoothing)
            values[i - 1, j - 1] = loss_ij.item()
            w = float(weights[i - 1, j - 1])
            if w == 0.0:
                continue
            term = loss_ij if w == 1.0 else loss_ij * w
            total = term if total is None else total + term
    assert total is not None
    overall = total * (1.0 / float(weights.sum()))
    return LossGrid(values=values, overall=overall)


def vanilla_loss(
    batch: Batch,
    params: Parameters,
    label_smoothing: float = 0.0,
    rng: np.random.Generator | None = None,
) -> Tensor:
    """Single cross-entropy of dec_M attending to enc_N."""
    cfg = params.config
    enc = encode_all(batch.src, params, rng=rng)
    N, M = cfg.enc_layers, cfg.dec_layers
    dec = decode_states(batch.tgt_in, enc[N], params, M, enc.key_mask, rng)
    return cross_entropy(project(dec[-1], params), batch.tgt_out, label_smoothing)
