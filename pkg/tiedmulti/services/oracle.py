"""Oracle layer-combination analysis from persisted decode logs."""

from collections.abc import Sequence
from pathlib import Path

import numpy as np

from tiedmulti.adapters.reports.tables import ReportTable, write_csv, write_json, write_text
from tiedmulti.core.models import DecodeRecord, LayerCombination, OracleReport, all_combinations
from tiedmulti.decoding.timed import total_seconds
from tiedmulti.metrics.bleu import corpus_bleu
from tiedmulti.metrics.chrf import sentence_chrf
from tiedmulti.metrics.gridfile import write_grid_file
from tiedmulti.metrics.oracle import (
    CombinationGrid,
    OracleLabel,
    oracle_distribution,
    oracle_label_set,
)
from tiedmulti.services.evaluation import hypotheses, read_logs

GRID_FILE = "oracle_grid.tsv"
REPORT_JSON = "oracle.json"
REPORT_TEXT = "oracle.txt"
HISTOGRAM_CSV = "oracle_histogram.csv"


def chrf_grids(
    logs: dict[LayerCombination, list[DecodeRecord]],
    references: Sequence[str],
    enc_layers: int,
    dec_layers: int,
) -> list[tuple[int, CombinationGrid]]:
    """Per-sentence chrF of every combination's output."""
    combos = list(all_combinations(enc_layers, dec_layers))
    texts = {combo: hypotheses(logs[combo]) for combo in combos}
    return [
        (
            i,
            CombinationGrid(
                np.asarray([sentence_chrf(texts[c][i], ref) for c in combos]),
                enc_layers,
                dec_layers,
            ),
        )
        for i, ref in enumerate(references)
    ]


def oracle_report(
    logs: dict[LayerCombination, list[DecodeRecord]],
    labels: Sequence[OracleLabel],
    references: Sequence[str],
    enc_layers: int,
    dec_layers: int,
    family: str,
) -> OracleReport:
    """Corpus BLEU and decode time of the fastest oracle pick per sentence vs (N, M)."""
    full = LayerCombination(n=enc_layers, m=dec_layers)
    picked = [logs[label.fastest_best][i] for i, label in enumerate(labels)]
    baseline = logs[full]
    return OracleReport(
        family=family,
        enc_layers=enc_layers,
        dec_layers=dec_layers,
        sentences=len(references),
        histogram=[int(v) for v in oracle_distribution(labels, enc_layers, dec_layers)],
        oracle_bleu=corpus_bleu(hypotheses(picked), references) if references else 0.0,
        baseline_bleu=corpus_bleu(hypotheses(baseline), references) if references else 0.0,
        oracle_seconds=total_seconds(picked),
        baseline_seconds=total_seconds(baseline),
    )


def histogram_table(report: OracleReport) -> ReportTable:
    table = ReportTable(title=f"Oracle combinations ({report.family})", headers=["n", "m", "count"])
    for combo, count in zip(
        all_combinations(report.enc_layers, report.dec_layers), report.histogram, strict=True
    ):
        table.add_row(combo.n, combo.m, count)
    return table


def run_oracle(
    decode_dir: Path,
    references: Sequence[str],
    enc_layers: int,
    dec_layers: int,
    out_dir: Path,
    family: str = "tied-multi",
) -> OracleReport:
    """
    Score every sentence at every combination and pick its oracle.

    Works for any family whose K decode logs sit in `decode_dir`: the
    tied-multi model's sub-models or the separately trained vanilla grid.
    Writes the score grids, the oracle histogram and the report.
    """
    logs = read_logs(decode_dir, list(all_combinations(enc_layers, dec_layers)), len(references))
    grids = chrf_grids(logs, references, enc_layers, dec_layers)
    labels = [oracle_label_set(grid) for _, grid in grids]
    if grids:
        write_grid_file(out_dir / GRID_FILE, grids)
    report = oracle_report(logs, labels, references, enc_layers, dec_layers, family)
    write_json(out_dir / REPORT_JSON, report)
    table = histogram_table(report)
    write_csv(out_dir / HISTOGRAM_CSV, table)
    summary = ReportTable(
        title=f"Oracle vs ({enc_layers},{dec_layers})",
        headers=["selection", "bleu", "total_s"],
    )
    summary.add_row("oracle", f"{report.oracle_bleu:.2f}", f"{report.oracle_seconds:.3f}")
    summary.add_row(
        f"{enc_layers},{dec_layers}",
        f"{report.baseline_bleu:.2f}",
        f"{report.baseline_seconds:.3f}",
    )
    write_text(out_dir / REPORT_TEXT, [table, summary])
    return report
