"""Padding sentence pairs into training batches."""

from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from tiedmulti.core.kinds import SpecialToken
from tiedmulti.utils.exceptions import CorpusError

IdArray = NDArray[np.int64]
EncodedPair = tuple[list[int], list[int]]


@dataclass(frozen=True)
class Batch:
    """Source ids, decoder inputs (BOS-shifted) and decoder targets (EOS-terminated)."""

    src: IdArray
    tgt_in: IdArray
    tgt_out: IdArray

    @property
    def size(self) -> int:
        return int(self.src.shape[0])


def _pad(rows: Sequence[list[int]]) -> IdArray:
    width = max(len(r) for r in rows)
    out = np.full((len(rows), width), int(SpecialToken.PAD), dtype=np.int64)
    for i, row in enumerate(rows):
        out[i, : len(row)] = row
    return out


def source_ids(tokens: Sequence[int]) -> list[int]:
    return [*tokens, int(SpecialToken.EOS)]


def make_batch(pairs: Sequence[EncodedPair]) -> Batch:
    """Pad a list of (source ids, target ids) pairs; special tokens are added here."""
    if not pairs:
        raise CorpusError("cannot build an empty batch")
    bos, eos = int(SpecialToken.BOS), int(SpecialToken.EOS)
    return Batch(
        src=_pad([source_ids(src) for src, _ in pairs]),
        tgt_in=_pad([[bos, *tgt] for _, tgt in pairs]),
        tgt_out=_pad([[*tgt, eos] for _, tgt in pairs]),
    )


def batch_indices(count: int, batch_size: int, seed: int) -> Iterator[NDArray[np.int64]]:
    """Endless stream of index batches, reshuffled every epoch from one seeded generator."""
    if count == 0:
        raise CorpusError("training corpus is empty")
    rng = np.random.default_rng(seed)
    size = min(batch_size, count)
    while True:
        order = rng.permutation(count)
        for start in range(0, count - size + 1, size):
            yield order[start : start + size]
