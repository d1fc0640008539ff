"""Greedy and beam search at any encoder/decoder depth.

The encoder runs once per sentence and only up to layer n. Each decoder
layer keeps the keys and values of its self-attention for the tokens
emitted so far, and the cross-attention keys and values are computed once
from the normalised encoder state, so a step costs one position per layer.
"""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from tiedmulti.config.experiment import BeamConfig
from tiedmulti.core.kinds import SpecialToken
from tiedmulti.core.models import LayerCombination
from tiedmulti.engine import functional as F
from tiedmulti.engine.tensor import Array, Tensor, concat, no_grad, take
from tiedmulti.model.transformer import (
    Parameters,
    attend,
    embed,
    encode_all,
    encoder_memory,
    feed_forward,
    merge_heads,
    norm,
    project,
    split_heads,
)
from tiedmulti.training.batching import source_ids

# Ids that may never be emitted.
_BLOCKED = (int(SpecialToken.PAD), int(SpecialToken.BOS), int(SpecialToken.CLS))
EOS = int(SpecialToken.EOS)


def length_penalty(length: int, alpha: float) -> float:
    """((5 + length) / 6) ** alpha."""
    return float(((5.0 + length) / 6.0) ** alpha)


class IncrementalDecoder:
    """Step-by-step decoder for one source sentence and one (n, m) combination.

    Rows of the cache are hypotheses; `reorder` keeps the rows a beam step
    selected.
    """

    def __init__(self, params: Parameters, combo: LayerCombination, src: Sequence[int]) -> None:
        cfg = params.config
        combo.check(cfg.enc_layers, cfg.dec_layers)
        self.params = params
        self.combo = combo
        self.heads = cfg.heads
        ids = np.asarray([source_ids(src)], dtype=np.int64)
        with no_grad():
            enc = encode_all(ids, params, depth=combo.n)
            memory = encoder_memory(enc[combo.n], params)
            self.cross: list[tuple[Tensor, Tensor]] = []
            for j in range(1, combo.m + 1):
                attn = params.decoder_layer(j).cross_attn
                k = split_heads(F.linear(memory, attn.key.weight, attn.key.bias), self.heads)
                v = split_heads(F.linear(memory, attn.value.weight, attn.value.bias), self.heads)
                self.cross.append((k, v))
        self.keys: list[Tensor | None] = [None] * combo.m
        self.values: list[Tensor | None] = [None] * combo.m
        self.position = 0

    def step(self, last_tokens: Sequence[int]) -> Array:
        """Log-probabilities (rows x vocab) of the next token after `last_tokens`."""
        params = self.params
        with no_grad():
            ids = np.asarray(last_tokens, dtype=np.int64)[:, None]
            y = embed(ids, params, offset=self.position)
            for j in range(1, self.combo.m + 1):
                layer = params.decoder_layer(j)
                h = norm(y, layer.self_norm)
                sa = layer.self_attn
                q = split_heads(F.linear(h, sa.query.weight, sa.query.bias), self.heads)
                k = split_heads(F.linear(h, sa.key.weight, sa.key.bias), self.heads)
                v = split_heads(F.linear(h, sa.value.weight, sa.value.bias), self.heads)
                cached_k, cached_v = self.keys[j - 1], self.values[j - 1]
                k = k if cached_k is None else concat([cached_k, k], axis=-2)
                v = v if cached_v is None else concat([cached_v, v], axis=-2)
                self.keys[j - 1], self.values[j - 1] = k, v
                mixed = merge_heads(attend(q, k, v, None))
                y = y + F.linear(mixed, sa.output.weight, sa.output.bias)

                h = norm(y, layer.cross_norm)
                ca = layer.cross_attn
                q = split_heads(F.linear(h, ca.query.weight, ca.query.bias), self.heads)
                cross_k, cross_v = self.cross[j - 1]
                y = y + F.linear(
                    merge_heads(attend(q, cross_k, cross_v, None)), ca.output.weight, ca.output.bias
                )
                y = y + feed_forward(norm(y, layer.ffn_norm), layer.ffn)
            logits = project(y, params)
            logp = F.log_softmax(logits).data[:, 0, :].copy()
        self.position += 1
        logp[:, _BLOCKED] = -np.inf
        return logp

    def reorder(self, rows: Sequence[int]) -> None:
        index = np.asarray(rows, dtype=np.int64)
        for j in range(self.combo.m):
            cached_k, cached_v = self.keys[j], self.values[j]
            if cached_k is not None and cached_v is not None:
                self.keys[j] = take(cached_k, index)
                self.values[j] = take(cached_v, index)

    @property
    def horizon(self) -> int:
        return self.params.config.max_len


def greedy_decode(
    params: Parameters, combo: LayerCombination, src: Sequence[int], max_len: int = 30
) -> list[int]:
    """Emit the most probable token at each step until EOS or `max_len` tokens."""
    decoder = IncrementalDecoder(params, combo, src)
    limit = min(max_len, decoder.horizon)
    out: list[int] = []
    last = int(SpecialToken.BOS)
    while len(out) < limit:
        token = int(np.argmax(decoder.step([last])[0]))
        out.append(token)
        if token == EOS:
            break
        last = token
    return out


@dataclass
class Hypothesis:
    tokens: list[int]
    log_prob: float
    score: float


def beam_search(
    params: Parameters, combo: LayerCombination, src: Sequence[int], cfg: BeamConfig
) -> Hypothesis:
    """Length-normalised beam search returning the best finished hypothesis.

    The `beam` best extensions of the live hypotheses are kept each step;
    those ending in EOS are frozen with score log_prob / lp(length). Search
    stops once no live hypothesis can still beat the best frozen score, or
    when the length cap is reached (live hypotheses are then frozen as they
    are). On equal scores the earlier-finished hypothesis wins.
    """
    decoder = IncrementalDecoder(params, combo, src)
    limit = min(cfg.max_len, decoder.horizon)
    best_possible_lp = length_penalty(limit, cfg.alpha)
    live: list[tuple[list[int], float]] = [([], 0.0)]
    best: Hypothesis | None = None

    def freeze(tokens: list[int], log_prob: float) -> None:
        nonlocal best
        score = log_prob / length_penalty(len(tokens), cfg.alpha)
        if best is None or score > best.score:
            best = Hypothesis(tokens=tokens, log_prob=log_prob, score=score)

    for _ in range(limit):
        last = [tokens[-1] if tokens else int(SpecialToken.BOS) for tokens, _ in live]
        logp = decoder.step(last)
        totals = np.asarray([lp for _, lp in live])[:, None] + logp
        flat = totals.reshape(-1)
        order = np.argsort(-flat, kind="stable")[: cfg.beam]
        vocab = logp.shape[1]
        survivors: list[tuple[list[int], float]] = []
        rows: list[int] = []
        for k in order:
            if not np.isfinite(flat[k]):
                break
            row, token = divmod(int(k), vocab)
            tokens = [*live[row][0], token]
            if token == EOS:
                freeze(tokens, float(flat[k]))
            else:
                survivors.append((tokens, float(flat[k])))
                rows.append(row)
        live = survivors
        if not live:
            break
        if len(live[0][0]) >= limit:
            for tokens, log_prob in live:
                freeze(tokens, log_prob)
            break
        if best is not None:
            bound = max(log_prob for _, log_prob in live) / best_possible_lp
            if best.score >= bound:
                break
        decoder.reorder(rows)

    if best is None:
        for tokens, log_prob in live:
            freeze(tokens, log_prob)
    assert best is not None
    return best


def beam_decode(
    params: Parameters, combo: LayerCombination, src: Sequence[int], cfg: BeamConfig
) -> list[int]:
    return beam_search(params, combo, src, cfg).tokens
