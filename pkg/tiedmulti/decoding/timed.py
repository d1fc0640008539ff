"""Sentence-at-a-time decoding with wall-clock timing, and the decode log format."""

import time
from collections.abc import Callable, Sequence
from pathlib import Path

from tiedmulti.config.experiment import BeamConfig
from tiedmulti.core.kinds import DecodeMode
from tiedmulti.core.models import DecodeRecord, LayerCombination
from tiedmulti.decoding.search import beam_decode, greedy_decode
from tiedmulti.model.transformer import Parameters
from tiedmulti.utils.exceptions import CorpusError, TiedMultiError
from tiedmulti.utils.logger import logger

Detokenizer = Callable[[Sequence[int]], str]


def decode_one(
    params: Parameters,
    combo: LayerCombination,
    src: Sequence[int],
    mode: DecodeMode,
    cfg: BeamConfig,
) -> list[int]:
    if mode == DecodeMode.GREEDY:
        return greedy_decode(params, combo, src, cfg.max_len)
    return beam_decode(params, combo, src, cfg)


def decode_corpus_timed(
    params: Parameters,
    combo: LayerCombination,
    corpus: Sequence[Sequence[int]],
    mode: DecodeMode,
    cfg: BeamConfig,
    detokenize: Detokenizer | None = None,
) -> list[DecodeRecord]:
    """
    Decode sentences one at a time, timing each decode.

    The timer covers the search including the encoder pass. A failing
    sentence is recorded with its error and the run continues.

    Args:
        params: Model weights
        combo: Layer combination to decode with
        corpus: Source token ids, one list per sentence
        mode: greedy or beam
        cfg: Beam width, length penalty and length cap
        detokenize: Optional id-to-text function for the record text

    Returns:
        One DecodeRecord per input sentence, in input order
    """
    records: list[DecodeRecord] = []
    for sentence_id, src in enumerate(corpus):
        started = time.perf_counter()
        try:
            tokens = decode_one(params, combo, src, mode, cfg)
            error = None
        except TiedMultiError as e:
            tokens, error = [], str(e)
            logger.warning(f"Sentence {sentence_id} failed at ({combo}): {e}")
        seconds = time.perf_counter() - started
        text = detokenize(tokens) if detokenize and error is None else ""
        records.append(
            DecodeRecord(
                sentence_id=sentence_id,
                combination=combo,
                tokens=tokens,
                seconds=seconds,
                mode=mode,
                text=text,
                error=error,
            )
        )
    return records


def total_seconds(records: Sequence[DecodeRecord]) -> float:
    return sum(r.seconds for r in records)


def format_decode_line(record: DecodeRecord) -> str:
    """sentence_id, n, m, mode, seconds (6 dp), text; failures carry the error as a 7th column."""
    cells = [
        str(record.sentence_id),
        str(record.combination.n),
        str(record.combination.m),
        str(record.mode),
        f"{record.seconds:.6f}",
        record.text,
    ]
    if record.error is not None:
        cells.append(record.error.replace("\t", " ").replace("\n", " "))
    return "\t".join(cells)


def parse_decode_line(line: str) -> DecodeRecord:
    cells = line.rstrip("\n").split("\t")
    if len(cells) not in (6, 7):
        raise CorpusError(f"decode log line has {len(cells)} fields, expected 6 or 7")
    try:
        return DecodeRecord(
            sentence_id=int(cells[0]),
            combination=LayerCombination(n=int(cells[1]), m=int(cells[2])),
            tokens=[],
            seconds=float(cells[4]),
            mode=DecodeMode(cells[3]),
            text=cells[5],
            error=cells[6] if len(cells) == 7 else None,
        )
    except ValueError as e:
        raise CorpusError(f"malformed decode log line: {e}") from e


def write_decode_log(path: Path, records: Sequence[DecodeRecord]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for record in records:
            f.write(format_decode_line(record) + "\n")
    return path


def read_decode_log(path: Path) -> list[DecodeRecord]:
    if not path.exists():
        raise CorpusError(f"decode log not found: {path}")
    with path.open("r", encoding="utf-8") as f:
        return [parse_decode_line(line) for line in f if line.strip()]
