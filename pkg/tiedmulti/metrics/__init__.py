"""Translation quality metrics and oracle layer-combination analysis."""

from tiedmulti.metrics.bleu import corpus_bleu
from tiedmulti.metrics.chrf import sentence_chrf
from tiedmulti.metrics.oracle import (
    CombinationGrid,
    OracleLabel,
    is_faster,
    oracle_combination,
    oracle_distribution,
    oracle_label_set,
)

__all__ = [
    "CombinationGrid",
    "OracleLabel",
    "corpus_bleu",
    "is_faster",
    "oracle_combination",
    "oracle_distribution",
    "oracle_label_set",
    "sentence_chrf",
]
