"""Self-attention classifier predicting which layer combinations translate a sentence best."""

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from tiedmulti.config.experiment import ModelConfig, SelectorConfig
from tiedmulti.core.kinds import SpecialToken
from tiedmulti.core.models import LayerCombination, all_combinations
from tiedmulti.engine import functional as F
from tiedmulti.engine.tensor import Array, Tensor, default_dtype, take
from tiedmulti.metrics.oracle import fastest
from tiedmulti.model.checkpoint import read_container, write_container
from tiedmulti.model.transformer import (
    EncoderLayer,
    Linear,
    Norm,
    Parameters,
    encoder_block,
    key_mask,
    new_encoder_layer,
    new_linear,
    new_norm,
    norm,
    walk_tensors,
)
from tiedmulti.utils.exceptions import CheckpointError, ConfigurationError, VocabularyError

SELECTOR_KIND = "selector"
CLS = int(SpecialToken.CLS)
PAD = int(SpecialToken.PAD)


@dataclass(eq=False)
class SelectorParameters:
    """Weights of the classifier; `enc_layers` x `dec_layers` = K output classes."""

    config: SelectorConfig = field(metadata={"skip": True})
    enc_layers: int = field(metadata={"skip": True})
    dec_layers: int = field(metadata={"skip": True})
    max_len: int = field(metadata={"skip": True})
    embedding: Tensor
    layers: list[EncoderLayer]
    final_norm: Norm
    output: Linear
    positions: Array = field(init=False, repr=False, metadata={"skip": True})

    def __post_init__(self) -> None:
        table = F.sinusoidal_positions(self.max_len, self.d_model)
        self.positions = table.astype(self.embedding.dtype)

    @property
    def d_model(self) -> int:
        return int(self.embedding.shape[1])

    @property
    def classes(self) -> int:
        return self.enc_layers * self.dec_layers

    def named_parameters(self) -> Iterator[tuple[str, Tensor]]:
        yield from walk_tensors(self, "")

    def parameters(self) -> list[Tensor]:
        return [t for _, t in self.named_parameters()]


def init_selector(
    config: SelectorConfig,
    embedding: Array,
    enc_layers: int,
    dec_layers: int,
    max_len: int,
) -> SelectorParameters:
    """Fresh classifier with a copy of `embedding` as its token table."""
    vocab, d_model = embedding.shape
    if d_model % config.heads != 0:
        raise ConfigurationError(f"d_model={d_model} is not divisible by {config.heads} heads")
    rng = np.random.default_rng(config.seed)
    layer_shape = ModelConfig(
        enc_layers=1,
        dec_layers=1,
        d_model=d_model,
        heads=config.heads,
        d_ff=config.d_ff,
        vocab=vocab,
        max_len=max_len,
    )
    return SelectorParameters(
        config=config,
        enc_layers=enc_layers,
        dec_layers=dec_layers,
        max_len=max_len,
        embedding=Tensor(embedding.copy(), requires_grad=True, dtype=default_dtype()),
        layers=[new_encoder_layer(rng, layer_shape) for _ in range(config.layers)],
        final_norm=new_norm(d_model),
        output=new_linear(rng, d_model, enc_layers * dec_layers),
    )


def selector_for_model(config: SelectorConfig, model: Parameters) -> SelectorParameters:
    """Classifier for a tied-multi model, initialised from its embedding table."""
    mc = model.config
    return init_selector(config, model.embedding.data, mc.enc_layers, mc.dec_layers, mc.max_len)


def pad_with_cls(
    batch: Sequence[Sequence[int]], max_len: int
) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """Append the classification token to every row and pad; returns ids and read-out indices."""
    if not batch or any(len(tokens) == 0 for tokens in batch):
        raise VocabularyError("selector inputs must be non-empty")
    longest = max(len(tokens) for tokens in batch) + 1
    if longest > max_len:
        raise VocabularyError(f"selector input of {longest} tokens exceeds max_len={max_len}")
    ids = np.full((len(batch), longest), PAD, dtype=np.int64)
    for row, tokens in enumerate(batch):
        ids[row, : len(tokens)] = tokens
        ids[row, len(tokens)] = CLS
    readout = np.asarray([len(tokens) for tokens in batch], dtype=np.int64)
    return ids, readout


def selector_logits(batch: Sequence[Sequence[int]], params: SelectorParameters) -> Tensor:
    """(B, K) scores read from each row's classification-token state."""
    ids, readout = pad_with_cls(batch, params.max_len)
    x = F.embedding(params.embedding, ids) * math.sqrt(params.d_model)
    x = x + params.positions[: ids.shape[1]]
    mask = key_mask(ids)
    for layer in params.layers:
        x = encoder_block(x, layer, params.config.heads, mask)
    cls_states = take(norm(x, params.final_norm), (np.arange(len(batch)), readout))
    return F.linear(cls_states, params.output.weight, params.output.bias)


def selector_probabilities(
    batch: Sequence[Sequence[int]], params: SelectorParameters
) -> Tensor:
    return F.sigmoid(selector_logits(batch, params))


def selector_forward(tokens: Sequence[int], params: SelectorParameters) -> Tensor:
    """K independent sigmoid probabilities for one sentence."""
    return selector_probabilities([tokens], params)[0]


def select_combination(
    probs: Sequence[float] | Array, threshold: float, enc_layers: int, dec_layers: int
) -> LayerCombination:
    """Highest-probability combination, or (N, M) when nothing reaches `threshold`.

    Exactly tied maxima resolve to the fastest combination in the speed order.
    """
    values = np.asarray(probs, dtype=np.float64).reshape(-1)
    combos = list(all_combinations(enc_layers, dec_layers))
    if values.shape != (len(combos),):
        raise VocabularyError(f"expected {len(combos)} probabilities, got {values.size}")
    peak = values.max()
    if peak < threshold:
        return LayerCombination(n=enc_layers, m=dec_layers)
    return fastest(c for c, v in zip(combos, values, strict=True) if v == peak)


def _header(params: SelectorParameters) -> dict[str, int]:
    cfg = params.config
    return {
        "layers": cfg.layers,
        "heads": cfg.heads,
        "d_ff": cfg.d_ff,
        "enc_layers": params.enc_layers,
        "dec_layers": params.dec_layers,
        "max_len": params.max_len,
    }


def save_selector(params: SelectorParameters, path: Path) -> Path:
    records = [(name, t.data) for name, t in params.named_parameters()]
    return write_container(path, SELECTOR_KIND, _header(params), records)


def load_selector(path: Path, config: SelectorConfig | None = None) -> SelectorParameters:
    """Rebuild a classifier; loss and optimiser settings come from `config`."""
    container = read_container(path)
    if container.kind != SELECTOR_KIND:
        raise CheckpointError(f"{path}: holds a {container.kind!r}, not a selector")
    h = container.header
    if "embedding" not in container.records:
        raise CheckpointError(f"{path}: selector has no embedding table")
    cfg = (config or SelectorConfig()).model_copy(
        update={"layers": h["layers"], "heads": h["heads"], "d_ff": h["d_ff"]}
    )
    params = init_selector(
        cfg, container.records["embedding"], h["enc_layers"], h["dec_layers"], h["max_len"]
    )
    expected = dict(params.named_parameters())
    if set(expected) != set(container.records):
        raise CheckpointError(f"{path}: selector weight names do not match")
    for name, tensor in expected.items():
        tensor.data = container.records[name].astype(default_dtype())
    return params
