"""Corpus-level BLEU: sacrebleu with 13a tokenization and exponential smoothing."""

from collections.abc import Sequence
from functools import cache

from sacrebleu.metrics import BLEU
from sacrebleu.tokenizers.tokenizer_13a import Tokenizer13a

from tiedmulti.utils.exceptions import CorpusError

MAX_ORDER = 4


@cache
def _scorer() -> BLEU:
    return BLEU(
        tokenize="13a", smooth_method="exp", max_ngram_order=MAX_ORDER, force=True
    )


def tokenize_13a(line: str) -> list[str]:
    """Split punctuation from words and digits, then split on whitespace."""
    return Tokenizer13a()(line).split()


def corpus_bleu(hyps: Sequence[str], refs: Sequence[str]) -> float:
    """BLEU in [0, 100]; raises CorpusError on a length mismatch.

    An order with zero matches gets precision 1 / (2^k * total), k counting
    the zero-match orders so far. A corpus with no matching unigram, or with
    no n-grams of some order at all, scores 0.
    """
    if len(hyps) != len(refs):
        raise CorpusError(f"{len(hyps)} hypotheses but {len(refs)} references")
    if not hyps:
        return 0.0
    return float(_scorer().corpus_score(list(hyps), [list(refs)]).score)
