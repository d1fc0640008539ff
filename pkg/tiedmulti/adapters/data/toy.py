"""Synthetic translation tasks over a closed symbol set."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from tiedmulti.adapters.text.vocabulary import Vocabulary
from tiedmulti.config.experiment import ToyTaskSpec
from tiedmulti.core.kinds import ToyTask
from tiedmulti.core.models import SentencePair
from tiedmulti.utils.exceptions import ConfigurationError

TRAIN_SHARE = 0.9


@dataclass
class ToyCorpus:
    train: list[SentencePair]
    test: list[SentencePair]
    vocabulary: Vocabulary


def transform(task: ToyTask, symbols: Sequence[int], alphabet: int, rot_k: int = 1) -> list[int]:
    """Target symbol indices for source symbol indices (0-based within the alphabet)."""
    if task == ToyTask.COPY:
        return list(symbols)
    if task == ToyTask.REVERSE:
        return list(reversed(symbols))
    if task == ToyTask.ROT:
        return [(s + rot_k) % alphabet for s in symbols]
    return sorted(symbols)


def _distinct_sentences(spec: ToyTaskSpec) -> int:
    return sum(spec.symbols**length for length in range(spec.min_len, spec.max_len + 1))


def generate_toy_corpus(spec: ToyTaskSpec) -> ToyCorpus:
    """Unique random source sentences, their task transform, split 90/10.

    Raises:
        ConfigurationError: The symbol set cannot produce `spec.size` distinct sentences.
    """
    if _distinct_sentences(spec) < spec.size:
        raise ConfigurationError(
            f"{spec.symbols} symbols at lengths {spec.min_len}..{spec.max_len} cannot yield "
            f"{spec.size} distinct sentences"
        )
    vocab = Vocabulary.for_symbols(spec.symbols)
    rng = np.random.default_rng(spec.seed)
    seen: set[tuple[int, ...]] = set()
    sentences: list[tuple[int, ...]] = []
    while len(sentences) < spec.size:
        length = int(rng.integers(spec.min_len, spec.max_len + 1))
        sentence = tuple(int(s) for s in rng.integers(0, spec.symbols, size=length))
        if sentence in seen:
            continue
        seen.add(sentence)
        sentences.append(sentence)

    def render(indices: Sequence[int]) -> str:
        return " ".join(vocab.symbols[i] for i in indices)

    pairs = [
        SentencePair(
            source=render(s), target=render(transform(spec.task, s, spec.symbols, spec.rot_k))
        )
        for s in sentences
    ]
    cut = int(round(TRAIN_SHARE * len(pairs)))
    return ToyCorpus(train=pairs[:cut], test=pairs[cut:], vocabulary=vocab)
