"""The tied-multi Transformer.

One parameter set holds N encoder and M decoder layers. Every encoder depth
n and decoder depth m can be run on its own: `encode_all` returns all
intermediate encoder states in one pass and `decode_states` returns every
decoder state against a chosen encoder state, so the N x M combinations
share computation during training.
"""

import math
from collections import Counter
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field, fields, is_dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

from tiedmulti.config.experiment import ModelConfig
from tiedmulti.core.kinds import SpecialToken
from tiedmulti.core.models import LayerCombination
from tiedmulti.engine import functional as F
from tiedmulti.engine.tensor import Array, Tensor, default_dtype, matmul, reshape, swapaxes
from tiedmulti.utils.exceptions import CombinationError, VocabularyError

TokenIds = NDArray[np.integer[Any]] | list[int]

PAD_ID = int(SpecialToken.PAD)


@dataclass(eq=False)
class Linear:
    weight: Tensor
    bias: Tensor


@dataclass(eq=False)
class Norm:
    gain: Tensor
    bias: Tensor


@dataclass(eq=False)
class Attention:
    query: Linear
    key: Linear
    value: Linear
    output: Linear


@dataclass(eq=False)
class FeedForward:
    inner: Linear
    outer: Linear


@dataclass(eq=False)
class EncoderLayer:
    self_norm: Norm
    self_attn: Attention
    ffn_norm: Norm
    ffn: FeedForward


@dataclass(eq=False)
class DecoderLayer:
    self_norm: Norm
    self_attn: Attention
    cross_norm: Norm
    cross_attn: Attention
    ffn_norm: Norm
    ffn: FeedForward


def walk_tensors(obj: Any, prefix: str) -> Iterator[tuple[str, Tensor]]:
    if isinstance(obj, Tensor):
        yield prefix, obj
    elif isinstance(obj, list):
        for i, item in enumerate(obj):
            yield from walk_tensors(item, f"{prefix}.{i}")
    elif is_dataclass(obj) and not isinstance(obj, type):
        for f in fields(obj):
            if f.metadata.get("skip"):
                continue
            name = f"{prefix}.{f.name}" if prefix else f.name
            yield from walk_tensors(getattr(obj, f.name), name)


@dataclass(eq=False)
class Parameters:
    """Learned weights of one tied-multi model.

    Under recurrent stacking `encoder` holds the same `EncoderLayer` object N
    times (and `decoder` the same `DecoderLayer` M times), so the layers share
    storage, not just values.
    """

    config: ModelConfig = field(metadata={"skip": True})
    embedding: Tensor
    encoder: list[EncoderLayer]
    decoder: list[DecoderLayer]
    encoder_norm: Norm
    decoder_norm: Norm
    positions: Array = field(init=False, repr=False, metadata={"skip": True})
    _accesses: Counter[tuple[str, int]] | None = field(
        default=None, init=False, repr=False, metadata={"skip": True}
    )

    def __post_init__(self) -> None:
        table = F.sinusoidal_positions(self.config.max_len, self.config.d_model)
        self.positions = table.astype(self.embedding.dtype)

    def named_parameters(self) -> Iterator[tuple[str, Tensor]]:
        """Distinct weight tensors with stable names; shared tensors appear once."""
        seen: set[int] = set()
        for name, tensor in walk_tensors(self, ""):
            if id(tensor) in seen:
                continue
            seen.add(id(tensor))
            yield name, tensor

    def parameters(self) -> list[Tensor]:
        return [t for _, t in self.named_parameters()]

    def encoder_layer(self, i: int) -> EncoderLayer:
        """1-based access to L^enc_i."""
        if self._accesses is not None:
            self._accesses["encoder", i] += 1
        return self.encoder[i - 1]

    def decoder_layer(self, j: int) -> DecoderLayer:
        """1-based access to L^dec_j."""
        if self._accesses is not None:
            self._accesses["decoder", j] += 1
        return self.decoder[j - 1]

    @contextmanager
    def instrument(self) -> Iterator[Counter[tuple[str, int]]]:
        """Count layer applications, keyed by ("encoder" | "decoder", index)."""
        self._accesses = Counter()
        try:
            yield self._accesses
        finally:
            self._accesses = None

    def requires_grad_(self, flag: bool = True) -> "Parameters":
        for t in self.parameters():
            t.requires_grad = flag
        return self

    def zero_grad(self) -> None:
        for t in self.parameters():
            t.grad = None


@dataclass
class EncoderStates:
    """enc_0 (the embedded input) through enc_n, plus the source key mask."""

    states: list[Tensor]
    key_mask: Array | None

    def __getitem__(self, i: int) -> Tensor:
        return self.states[i]

    @property
    def depth(self) -> int:
        return len(self.states) - 1


# Initialisation


def new_linear(rng: np.random.Generator, fan_in: int, fan_out: int) -> Linear:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    dtype = default_dtype()
    return Linear(
        weight=Tensor(
            rng.uniform(-limit, limit, (fan_in, fan_out)), requires_grad=True, dtype=dtype
        ),
        bias=Tensor(np.zeros(fan_out), requires_grad=True, dtype=dtype),
    )


def new_norm(width: int) -> Norm:
    dtype = default_dtype()
    return Norm(
        gain=Tensor(np.ones(width), requires_grad=True, dtype=dtype),
        bias=Tensor(np.zeros(width), requires_grad=True, dtype=dtype),
    )


def _attention(rng: np.random.Generator, d: int) -> Attention:
    return Attention(*(new_linear(rng, d, d) for _ in range(4)))


def _ffn(rng: np.random.Generator, d: int, d_ff: int) -> FeedForward:
    return FeedForward(inner=new_linear(rng, d, d_ff), outer=new_linear(rng, d_ff, d))


def new_encoder_layer(rng: np.random.Generator, config: ModelConfig) -> EncoderLayer:
    d = config.d_model
    return EncoderLayer(new_norm(d), _attention(rng, d), new_norm(d), _ffn(rng, d, config.d_ff))


def new_decoder_layer(rng: np.random.Generator, config: ModelConfig) -> DecoderLayer:
    d = config.d_model
    return DecoderLayer(
        new_norm(d),
        _attention(rng, d),
        new_norm(d),
        _attention(rng, d),
        new_norm(d),
        _ffn(rng, d, config.d_ff),
    )


def init_parameters(config: ModelConfig, seed: int = 1234) -> Parameters:
    """Fresh weights: Xavier-uniform projections, N(0, d^-1/2) embeddings, unit norms."""
    rng = np.random.default_rng(seed)
    d = config.d_model
    table = rng.normal(0.0, d**-0.5, (config.vocab, d))
    if config.recurrent_stacking:
        shared_enc = new_encoder_layer(rng, config)
        shared_dec = new_decoder_layer(rng, config)
        encoder = [shared_enc] * config.enc_layers
        decoder = [shared_dec] * config.dec_layers
    else:
        encoder = [new_encoder_layer(rng, config) for _ in range(config.enc_layers)]
        decoder = [new_decoder_layer(rng, config) for _ in range(config.dec_layers)]
    return Parameters(
        config=config,
        embedding=Tensor(table, requires_grad=True, dtype=default_dtype()),
        encoder=encoder,
        decoder=decoder,
        encoder_norm=new_norm(d),
        decoder_norm=new_norm(d),
    )


# Building blocks


def split_heads(x: Tensor, heads: int) -> Tensor:
    """(..., T, d) -> (..., heads, T, d / heads)."""
    *lead, length, width = x.shape
    return swapaxes(reshape(x, (*lead, length, heads, width // heads)), -3, -2)


def merge_heads(x: Tensor) -> Tensor:
    """(..., heads, T, dk) -> (..., T, heads * dk)."""
    *lead, heads, length, dk = x.shape
    return reshape(swapaxes(x, -3, -2), (*lead, length, heads * dk))


def attend(q: Tensor, k: Tensor, v: Tensor, mask: Array | None) -> Tensor:
    """Scaled dot-product attention over head-split tensors."""
    scores = matmul(q, swapaxes(k, -1, -2)) * (1.0 / math.sqrt(q.shape[-1]))
    if mask is not None:
        scores = scores + mask
    return matmul(F.softmax_rows(scores), v)


def multi_head_attention(
    x: Tensor, memory: Tensor, weights: Attention, heads: int, mask: Array | None
) -> Tensor:
    q = split_heads(F.linear(x, weights.query.weight, weights.query.bias), heads)
    k = split_heads(F.linear(memory, weights.key.weight, weights.key.bias), heads)
    v = split_heads(F.linear(memory, weights.value.weight, weights.value.bias), heads)
    return F.linear(merge_heads(attend(q, k, v, mask)), weights.output.weight, weights.output.bias)


def feed_forward(x: Tensor, weights: FeedForward) -> Tensor:
    hidden = F.relu(F.linear(x, weights.inner.weight, weights.inner.bias))
    return F.linear(hidden, weights.outer.weight, weights.outer.bias)


def norm(x: Tensor, weights: Norm) -> Tensor:
    return F.layer_norm(x, weights.gain, weights.bias)


def embed(
    ids: NDArray[np.integer[Any]],
    params: Parameters,
    offset: int = 0,
    rng: np.random.Generator | None = None,
) -> Tensor:
    """Scaled shared-embedding lookup plus sinusoidal positions starting at `offset`."""
    length = ids.shape[-1]
    if offset + length > params.config.max_len:
        raise VocabularyError(
            f"sequence of {offset + length} tokens exceeds max_len={params.config.max_len}"
        )
    scaled = F.embedding(params.embedding, ids) * math.sqrt(params.config.d_model)
    x = scaled + params.positions[offset : offset + length]
    return F.dropout(x, params.config.dropout, rng)


def encoder_block(
    x: Tensor,
    layer: EncoderLayer,
    heads: int,
    mask: Array | None,
    dropout: float = 0.0,
    rng: np.random.Generator | None = None,
) -> Tensor:
    """Pre-LN self-attention and feed-forward sublayers with residuals."""
    h = norm(x, layer.self_norm)
    x = x + F.dropout(multi_head_attention(h, h, layer.self_attn, heads, mask), dropout, rng)
    return x + F.dropout(feed_forward(norm(x, layer.ffn_norm), layer.ffn), dropout, rng)


def decoder_block(
    y: Tensor,
    memory: Tensor,
    layer: DecoderLayer,
    heads: int,
    self_mask: Array | None,
    memory_mask: Array | None,
    dropout: float = 0.0,
    rng: np.random.Generator | None = None,
) -> Tensor:
    h = norm(y, layer.self_norm)
    y = y + F.dropout(multi_head_attention(h, h, layer.self_attn, heads, self_mask), dropout, rng)
    h = norm(y, layer.cross_norm)
    y = y + F.dropout(
        multi_head_attention(h, memory, layer.cross_attn, heads, memory_mask), dropout, rng
    )
    return y + F.dropout(feed_forward(norm(y, layer.ffn_norm), layer.ffn), dropout, rng)


def key_mask(ids: NDArray[np.integer[Any]]) -> Array | None:
    """Padding mask for a source batch, or None when nothing is padded."""
    return F.padding_mask(ids, PAD_ID) if np.any(ids == PAD_ID) else None


# Forward passes


def encode_all(
    src: TokenIds,
    params: Parameters,
    depth: int | None = None,
    rng: np.random.Generator | None = None,
) -> EncoderStates:
    """Run encoder layers 1..depth (default N) once, keeping every intermediate state.

    Args:
        src: (S,) or (B, S) source token ids.
        params: Model weights.
        depth: Highest encoder layer to run.
        rng: Dropout generator; None disables dropout.

    Returns:
        enc_0..enc_depth, each (..., S, d_model).
    """
    cfg = params.config
    depth = cfg.enc_layers if depth is None else depth
    if not 1 <= depth <= cfg.enc_layers:
        raise CombinationError(f"encoder depth {depth} outside 1..{cfg.enc_layers}")
    ids = np.asarray(src, dtype=np.int64)
    mask = key_mask(ids)
    states = [embed(ids, params, rng=rng)]
    for i in range(1, depth + 1):
        layer = params.encoder_layer(i)
        states.append(encoder_block(states[-1], layer, cfg.heads, mask, cfg.dropout, rng))
    return EncoderStates(states=states, key_mask=mask)


def encoder_memory(enc_i: Tensor, params: Parameters) -> Tensor:
    """The shared final encoder norm applied to the chosen encoder state."""
    return norm(enc_i, params.encoder_norm)


def decode_states(
    tgt_prefix: TokenIds,
    enc_i: Tensor,
    params: Parameters,
    m: int,
    src_mask: Array | None = None,
    rng: np.random.Generator | None = None,
) -> list[Tensor]:
    """dec_1..dec_m for a decoder input attending to one encoder state.

    Self-attention is causal; every decoder layer cross-attends to the
    normalised `enc_i`.
    """
    cfg = params.config
    if not 1 <= m <= cfg.dec_layers:
        raise CombinationError(f"decoder depth {m} outside 1..{cfg.dec_layers}")
    ids = np.asarray(tgt_prefix, dtype=np.int64)
    memory = encoder_memory(enc_i, params)
    causal = F.causal_mask(ids.shape[-1])
    y = embed(ids, params, rng=rng)
    states = []
    for j in range(1, m + 1):
        layer = params.decoder_layer(j)
        y = decoder_block(y, memory, layer, cfg.heads, causal, src_mask, cfg.dropout, rng)
        states.append(y)
    return states


def project(dec_j: Tensor, params: Parameters) -> Tensor:
    """Logits over the shared vocabulary: final decoder norm, then the tied embedding."""
    return matmul(norm(dec_j, params.decoder_norm), swapaxes(params.embedding, 0, 1))


def forward_combination(
    src: TokenIds,
    tgt: TokenIds,
    params: Parameters,
    combo: LayerCombination,
    rng: np.random.Generator | None = None,
) -> Tensor:
    """Logits of the (n, m) sub-model: dec_m computed against enc_n."""
    combo.check(params.config.enc_layers, params.config.dec_layers)
    enc = encode_all(src, params, depth=combo.n, rng=rng)
    dec = decode_states(tgt, enc[combo.n], params, combo.m, enc.key_mask, rng=rng)
    return project(dec[-1], params)


def extract_submodel(params: Parameters, combo: LayerCombination) -> Parameters:
    """A standalone (n, m) model holding copies of the first n encoder and m decoder layers."""
    cfg = params.config
    combo.check(cfg.enc_layers, cfg.dec_layers)
    memo: dict[int, Any] = {}

    def copy(obj: Any) -> Any:
        if id(obj) in memo:
            return memo[id(obj)]
        if isinstance(obj, Tensor):
            out: Any = Tensor(obj.data.copy(), requires_grad=obj.requires_grad, dtype=obj.dtype)
        else:
            out = type(obj)(**{f.name: copy(getattr(obj, f.name)) for f in fields(obj)})
        memo[id(obj)] = out
        return out

    return Parameters(
        config=cfg.with_depth(combo.n, combo.m),
        embedding=copy(params.embedding),
        encoder=[copy(layer) for layer in params.encoder[: combo.n]],
        decoder=[copy(layer) for layer in params.decoder[: combo.m]],
        encoder_norm=copy(params.encoder_norm),
        decoder_norm=copy(params.decoder_norm),
    )


# Size accounting


def _encoder_layer_size(d: int, d_ff: int) -> int:
    return 4 * (d * d + d) + (d * d_ff + d_ff) + (d_ff * d + d) + 2 * (2 * d)


def _decoder_layer_size(d: int, d_ff: int) -> int:
    return 8 * (d * d + d) + (d * d_ff + d_ff) + (d_ff * d + d) + 3 * (2 * d)


def param_count(config: ModelConfig) -> int:
    """Exact number of learnable scalars (shared tensors counted once).

    Under recurrent stacking the layer stacks contribute one layer each,
    whatever N and M are.
    """
    d = config.d_model
    enc_layers = 1 if config.recurrent_stacking else config.enc_layers
    dec_layers = 1 if config.recurrent_stacking else config.dec_layers
    return (
        config.vocab * d
        + enc_layers * _encoder_layer_size(d, config.d_ff)
        + dec_layers * _decoder_layer_size(d, config.d_ff)
        + 2 * (2 * d)
    )


# Adam keeps two moment slots next to every weight in a training checkpoint.
CHECKPOINT_SLOTS = 3


def checkpoint_variable_count(config: ModelConfig) -> int:
    """Variables a training checkpoint stores: weights plus optimizer moments."""
    return CHECKPOINT_SLOTS * param_count(config)
