"""Decoding a test set with the combination the classifier picks for each sentence."""

import time
from collections.abc import Sequence
from pathlib import Path

from tiedmulti.adapters.reports.tables import ReportTable, write_json, write_text
from tiedmulti.adapters.text.vocabulary import Vocabulary
from tiedmulti.config.experiment import BeamConfig
from tiedmulti.core.kinds import DecodeMode
from tiedmulti.core.models import (
    DecodeRecord,
    LayerCombination,
    SelectionReport,
    SentencePair,
    all_combinations,
)
from tiedmulti.decoding.timed import decode_one, total_seconds, write_decode_log
from tiedmulti.engine.tensor import no_grad
from tiedmulti.metrics.bleu import corpus_bleu
from tiedmulti.metrics.oracle import oracle_label_set
from tiedmulti.model.transformer import Parameters
from tiedmulti.selector.model import SelectorParameters, select_combination, selector_forward
from tiedmulti.services.evaluation import decode_and_log, decode_log_path, hypotheses, read_logs
from tiedmulti.services.oracle import chrf_grids
from tiedmulti.utils.exceptions import CombinationError, TiedMultiError
from tiedmulti.utils.logger import logger

SELECTED_LOG = "selected.tsv"
REPORT_JSON = "selection.json"
REPORT_TEXT = "selection.txt"


def choose(
    selector: SelectorParameters, tokens: Sequence[int], threshold: float
) -> tuple[LayerCombination, bool]:
    """The predicted combination and whether it came from the back-off rule."""
    with no_grad():
        probs = selector_forward(tokens, selector).data
    combo = select_combination(probs, threshold, selector.enc_layers, selector.dec_layers)
    return combo, bool(probs.max() < threshold)


def run_select_decode(
    model: Parameters,
    selector: SelectorParameters,
    test: Sequence[SentencePair],
    vocab: Vocabulary,
    mode: DecodeMode,
    cfg: BeamConfig,
    threshold: float,
    out_dir: Path,
    decode_dir: Path | None = None,
) -> SelectionReport:
    """
    Translate each sentence at its predicted combination and compare.

    The (N, M) baseline and the oracle come from the cost-benefit logs in
    `decode_dir` when given; without them the baseline is decoded here and
    the oracle columns stay empty.
    """
    mc = model.config
    if (selector.enc_layers, selector.dec_layers) != (mc.enc_layers, mc.dec_layers):
        raise CombinationError(
            f"selector predicts {selector.enc_layers}x{selector.dec_layers} combinations, "
            f"model has {mc.enc_layers}x{mc.dec_layers}"
        )
    combos = list(all_combinations(mc.enc_layers, mc.dec_layers))
    full = LayerCombination(n=mc.enc_layers, m=mc.dec_layers)
    references = [p.target for p in test]
    sources = [vocab.encode(p.source) for p in test]

    choices = [0] * len(combos)
    backoffs = 0
    selector_seconds = 0.0
    records: list[DecodeRecord] = []
    for sentence_id, src in enumerate(sources):
        started = time.perf_counter()
        combo, backed_off = choose(selector, src, threshold)
        selector_seconds += time.perf_counter() - started
        choices[combo.index(mc.dec_layers)] += 1
        backoffs += int(backed_off)
        started = time.perf_counter()
        try:
            tokens, error = decode_one(model, combo, src, mode, cfg), None
        except TiedMultiError as e:
            tokens, error = [], str(e)
            logger.warning(f"Sentence {sentence_id} failed at ({combo}): {e}")
        records.append(
            DecodeRecord(
                sentence_id=sentence_id,
                combination=combo,
                tokens=tokens,
                seconds=time.perf_counter() - started,
                mode=mode,
                text=vocab.decode(tokens) if error is None else "",
                error=error,
            )
        )
    write_decode_log(out_dir / SELECTED_LOG, records)

    oracle_bleu: float | None = None
    oracle_seconds: float | None = None
    if decode_dir is not None:
        logs = read_logs(decode_dir, combos, len(test))
        baseline = logs[full]
        grids = chrf_grids(logs, references, mc.enc_layers, mc.dec_layers)
        picked = [logs[oracle_label_set(g).fastest_best][i] for i, g in grids]
        oracle_bleu = corpus_bleu(hypotheses(picked), references) if picked else 0.0
        oracle_seconds = total_seconds(picked)
    else:
        baseline = decode_and_log(
            model, full, sources, vocab, mode, cfg, decode_log_path(out_dir, full)
        )

    report = SelectionReport(
        sentences=len(test),
        threshold=threshold,
        choices=choices,
        backoffs=backoffs,
        selected_bleu=corpus_bleu(hypotheses(records), references) if records else 0.0,
        selected_seconds=total_seconds(records),
        selector_seconds=selector_seconds,
        baseline_bleu=corpus_bleu(hypotheses(baseline), references) if baseline else 0.0,
        baseline_seconds=total_seconds(baseline),
        oracle_bleu=oracle_bleu,
        oracle_seconds=oracle_seconds,
    )
    write_json(out_dir / REPORT_JSON, report)
    write_text(out_dir / REPORT_TEXT, [selection_table(report, full)])
    return report


def selection_table(report: SelectionReport, full: LayerCombination) -> ReportTable:
    table = ReportTable(
        title=f"Selector decoding (threshold {report.threshold})",
        headers=["selection", "bleu", "total_s"],
    )
    table.add_row(
        "selector",
        f"{report.selected_bleu:.2f}",
        f"{report.selected_seconds + report.selector_seconds:.3f}",
    )
    table.add_row(str(full), f"{report.baseline_bleu:.2f}", f"{report.baseline_seconds:.3f}")
    if report.oracle_bleu is not None and report.oracle_seconds is not None:
        table.add_row("oracle", f"{report.oracle_bleu:.2f}", f"{report.oracle_seconds:.3f}")
    return table
