"""Quality and decoding cost of every layer combination of one model."""

from collections.abc import Mapping, Sequence
from pathlib import Path

from tiedmulti.adapters.reports.tables import ReportTable, write_csv, write_json, write_text
from tiedmulti.adapters.text.vocabulary import Vocabulary
from tiedmulti.config.experiment import BeamConfig
from tiedmulti.core.kinds import DecodeMode
from tiedmulti.core.models import (
    CostBenefitReport,
    CostBenefitRow,
    LayerCombination,
    SentencePair,
    all_combinations,
)
from tiedmulti.model.transformer import Parameters
from tiedmulti.services.evaluation import (
    decode_and_log,
    decode_log_path,
    evaluate_records,
    read_logs,
)
from tiedmulti.utils.logger import logger

DECODE_DIR = "decode"
VANILLA_DECODE_DIR = "vanilla-decode"
REPORT_JSON = "cost_benefit.json"
REPORT_TEXT = "cost_benefit.txt"
REPORT_CSV = "cost_benefit.csv"


def cost_benefit_from_logs(
    decode_dir: Path,
    references: Sequence[str],
    enc_layers: int,
    dec_layers: int,
    mode: DecodeMode,
    model_kind: str,
    checkpoint: str,
    vanilla_decode_dir: Path | None = None,
) -> CostBenefitReport:
    """Build the K-row report from persisted decode logs only."""
    combos = list(all_combinations(enc_layers, dec_layers))
    logs = read_logs(decode_dir, combos, len(references))
    vanilla_logs = (
        read_logs(vanilla_decode_dir, combos, len(references)) if vanilla_decode_dir else {}
    )
    rows = []
    for combo in combos:
        result = evaluate_records(logs[combo], references)
        row = CostBenefitRow(
            n=combo.n,
            m=combo.m,
            bleu=result.bleu,
            total_seconds=result.total_seconds,
            mean_seconds=result.total_seconds / result.sentences if result.sentences else 0.0,
            sentences=result.sentences,
            failures=result.failures,
        )
        if combo in vanilla_logs:
            vanilla = evaluate_records(vanilla_logs[combo], references)
            row.vanilla_bleu = vanilla.bleu
            row.vanilla_seconds = vanilla.total_seconds
        rows.append(row)
    return CostBenefitReport(
        model_kind=model_kind,
        checkpoint=checkpoint,
        mode=mode,
        enc_layers=enc_layers,
        dec_layers=dec_layers,
        rows=rows,
    )


def cost_benefit_table(report: CostBenefitReport) -> ReportTable:
    with_vanilla = any(r.vanilla_bleu is not None for r in report.rows)
    headers = ["n", "m", "bleu", "total_s", "mean_s", "failures"]
    if with_vanilla:
        headers += ["vanilla_bleu", "vanilla_total_s"]
    table = ReportTable(
        title=f"{report.model_kind} {report.mode} ({report.checkpoint})", headers=headers
    )
    for r in report.rows:
        cells: list[object] = [
            r.n,
            r.m,
            f"{r.bleu:.2f}",
            f"{r.total_seconds:.3f}",
            f"{r.mean_seconds:.6f}",
            r.failures,
        ]
        if with_vanilla:
            cells += [
                "" if r.vanilla_bleu is None else f"{r.vanilla_bleu:.2f}",
                "" if r.vanilla_seconds is None else f"{r.vanilla_seconds:.3f}",
            ]
        table.add_row(*cells)
    return table


def run_cost_benefit(
    params: Parameters,
    test: Sequence[SentencePair],
    vocab: Vocabulary,
    mode: DecodeMode,
    cfg: BeamConfig,
    out_dir: Path,
    checkpoint: str = "",
    model_kind: str = "tied-multi",
    vanilla: Mapping[LayerCombination, Parameters] | None = None,
) -> CostBenefitReport:
    """
    Decode the test set at every (n, m), then score the persisted logs.

    Vanilla models, keyed by their depth, are each decoded at full depth
    and reported alongside the row of the same combination.
    """
    mc = params.config
    sources = [vocab.encode(p.source) for p in test]
    decode_dir = out_dir / DECODE_DIR
    for combo in all_combinations(mc.enc_layers, mc.dec_layers):
        decode_and_log(params, combo, sources, vocab, mode, cfg, decode_log_path(decode_dir, combo))
        logger.info(f"Decoded {len(sources)} sentences at ({combo})")

    vanilla_dir = None
    if vanilla:
        vanilla_dir = out_dir / VANILLA_DECODE_DIR
        for combo, model in vanilla.items():
            full = LayerCombination(n=model.config.enc_layers, m=model.config.dec_layers)
            log_path = decode_log_path(vanilla_dir, combo)
            decode_and_log(model, full, sources, vocab, mode, cfg, log_path)
            logger.info(f"Decoded {len(sources)} sentences with the vanilla ({combo}) model")

    report = cost_benefit_from_logs(
        decode_dir,
        [p.target for p in test],
        mc.enc_layers,
        mc.dec_layers,
        mode,
        model_kind,
        checkpoint,
        vanilla_dir,
    )
    write_json(out_dir / REPORT_JSON, report)
    table = cost_benefit_table(report)
    write_text(out_dir / REPORT_TEXT, [table])
    write_csv(out_dir / REPORT_CSV, table)
    return report
