"""Decode-and-score helpers shared by every report."""

from collections.abc import Sequence
from pathlib import Path

from tiedmulti.adapters.text.vocabulary import Vocabulary
from tiedmulti.config.experiment import BeamConfig
from tiedmulti.core.kinds import DecodeMode
from tiedmulti.core.models import DecodeRecord, EvaluationResult, LayerCombination
from tiedmulti.decoding.timed import (
    decode_corpus_timed,
    read_decode_log,
    total_seconds,
    write_decode_log,
)
from tiedmulti.metrics.bleu import corpus_bleu
from tiedmulti.metrics.chrf import sentence_chrf
from tiedmulti.model.transformer import Parameters
from tiedmulti.utils.exceptions import CorpusError
from tiedmulti.utils.logger import logger


def decode_log_path(decode_dir: Path, combo: LayerCombination) -> Path:
    return decode_dir / f"decode-{combo.n}-{combo.m}.tsv"


def hypotheses(records: Sequence[DecodeRecord]) -> list[str]:
    """Decoded texts, with failed sentences scored as empty output."""
    return [r.text if r.error is None else "" for r in records]


def evaluate_records(
    records: Sequence[DecodeRecord], references: Sequence[str]
) -> EvaluationResult:
    """Corpus BLEU and mean sentence chrF of decoded records."""
    if len(records) != len(references):
        raise CorpusError(
            f"{len(records)} decoded sentences for {len(references)} references"
        )
    hyps = hypotheses(records)
    chrf = [sentence_chrf(h, r) for h, r in zip(hyps, references, strict=True)]
    return EvaluationResult(
        bleu=corpus_bleu(hyps, references) if hyps else 0.0,
        chrf=sum(chrf) / len(chrf) if chrf else 0.0,
        sentences=len(records),
        failures=sum(1 for r in records if r.error is not None),
        total_seconds=total_seconds(records),
    )


def decode_and_log(
    params: Parameters,
    combo: LayerCombination,
    sources: Sequence[Sequence[int]],
    vocab: Vocabulary,
    mode: DecodeMode,
    cfg: BeamConfig,
    log_path: Path | None = None,
) -> list[DecodeRecord]:
    """Timed decode of a whole corpus, written to `log_path` when given."""
    records = decode_corpus_timed(params, combo, sources, mode, cfg, detokenize=vocab.decode)
    if log_path is not None:
        write_decode_log(log_path, records)
        logger.debug(f"Decode log written: {log_path}")
    return records


def read_logs(
    decode_dir: Path, combos: Sequence[LayerCombination], sentences: int
) -> dict[LayerCombination, list[DecodeRecord]]:
    """The decode log of every combination, each checked to cover `sentences` lines."""
    logs = {}
    for combo in combos:
        path = decode_log_path(decode_dir, combo)
        records = read_decode_log(path)
        if len(records) != sentences:
            raise CorpusError(f"{path}: {len(records)} lines, expected {sentences}")
        logs[combo] = records
    return logs
