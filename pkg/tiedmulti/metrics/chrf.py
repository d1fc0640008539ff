"""Sentence-level character n-gram F-score on sacrebleu's CHRF."""

from functools import cache

from sacrebleu.metrics import CHRF

DEFAULT_ORDER = 6
DEFAULT_BETA = 2


@cache
def _scorer(max_n: int, beta: int) -> CHRF:
    return CHRF(char_order=max_n, word_order=0, beta=beta)


def sentence_chrf(
    hyp: str, ref: str, max_n: int = DEFAULT_ORDER, beta: int = DEFAULT_BETA
) -> float:
    """chrF in [0, 1].

    Whitespace is removed before n-gram extraction. Precision and recall are
    averaged over the effective orders (those for which both strings have at
    least one n-gram). Two empty strings score 1.0, one empty string 0.0.
    """
    if not hyp.split() and not ref.split():
        return 1.0
    return float(_scorer(max_n, beta).sentence_score(hyp, [ref]).score) / 100.0
