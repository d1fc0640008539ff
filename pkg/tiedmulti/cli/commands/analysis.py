"""Analysis commands: `cost-benefit`, `oracle`, `sizes` and `report`."""

import re
from pathlib import Path
from typing import Annotated

import typer

from tiedmulti.adapters.data.corpus import read_corpus
from tiedmulti.adapters.reports.tables import write_csv, write_json, write_text
from tiedmulti.cli.common import (
    AlphaOption,
    BeamOption,
    DecLayersOption,
    EncLayersOption,
    ModeOption,
    OutOption,
    get_settings,
    resolve_out,
)
from tiedmulti.cli.ui import select_ui
from tiedmulti.config.experiment import ModelConfig
from tiedmulti.model.checkpoint import load_checkpoint
from tiedmulti.services.cost_benefit import cost_benefit_table, run_cost_benefit
from tiedmulti.services.data import find_vocabulary
from tiedmulti.services.oracle import histogram_table, run_oracle
from tiedmulti.services.report import write_report
from tiedmulti.services.sizes import SIZES_JSON, report_model_sizes, size_table
from tiedmulti.services.training import load_vanilla_grid
from tiedmulti.utils.exceptions import CorpusError

SIZES_TEXT = "sizes.txt"
SIZES_CSV = "sizes.csv"

_LOG_NAME = re.compile(r"decode-(\d+)-(\d+)\.tsv")

TestFile = Annotated[
    Path,
    typer.Option("--test", exists=True, dir_okay=False, help="Corpus (source<TAB>target)"),
]


def infer_depth(decode_dir: Path) -> tuple[int, int]:
    """(N, M) from the deepest decode log present in `decode_dir`."""
    depths = [
        (int(m.group(1)), int(m.group(2)))
        for p in decode_dir.glob("decode-*-*.tsv")
        if (m := _LOG_NAME.fullmatch(p.name))
    ]
    if not depths:
        raise CorpusError(f"no decode logs in {decode_dir}")
    return max(n for n, _ in depths), max(m for _, m in depths)


def cost_benefit_command(
    ctx: typer.Context,
    checkpoint: Annotated[
        Path, typer.Option("--checkpoint", exists=True, dir_okay=False, help="Model checkpoint")
    ],
    test: TestFile,
    vanilla_dir: Annotated[
        Path | None,
        typer.Option(
            "--vanilla-dir",
            exists=True,
            file_okay=False,
            help="Vanilla grid from train-vanilla-grid, reported beside each row",
        ),
    ] = None,
    mode: ModeOption = None,
    beam: BeamOption = None,
    alpha: AlphaOption = None,
    out: OutOption = None,
) -> None:
    """Decode the test set at every (n, m) and report BLEU against decoding time."""
    settings = get_settings(ctx, mode=mode, beam=beam, alpha=alpha)
    vocab = find_vocabulary(test)
    params = load_checkpoint(checkpoint)
    mc = params.config
    vanilla = load_vanilla_grid(vanilla_dir, mc.enc_layers, mc.dec_layers) if vanilla_dir else None
    out_dir = resolve_out(settings, out, "cost-benefit")
    ui = select_ui()
    try:
        ui.show_step(f"Decoding {mc.combinations} combinations with {settings.mode}")
        report = run_cost_benefit(
            params,
            read_corpus(test),
            vocab,
            settings.mode,
            settings.beam_settings(),
            out_dir,
            checkpoint=str(checkpoint),
            vanilla=vanilla,
        )
        ui.show_table(cost_benefit_table(report))
        ui.show_result("out", str(out_dir))
    finally:
        ui.cleanup()


def oracle_command(
    ctx: typer.Context,
    decode_dir: Annotated[
        Path,
        typer.Option("--decode-dir", exists=True, file_okay=False, help="Directory of decode logs"),
    ],
    test: TestFile,
    enc_layers: EncLayersOption = None,
    dec_layers: DecLayersOption = None,
    family: Annotated[
        str, typer.Option("--family", help="Label for the model family in the report")
    ] = "tied-multi",
    out: OutOption = None,
) -> None:
    """Find each sentence's fastest best combination from existing decode logs."""
    settings = get_settings(ctx)
    if enc_layers is None or dec_layers is None:
        found_n, found_m = infer_depth(decode_dir)
        enc_layers = enc_layers or found_n
        dec_layers = dec_layers or found_m
    out_dir = resolve_out(settings, out, "oracle")
    ui = select_ui()
    try:
        ui.show_step(f"Scoring {enc_layers * dec_layers} combinations per sentence")
        report = run_oracle(
            decode_dir,
            [p.target for p in read_corpus(test)],
            enc_layers,
            dec_layers,
            out_dir,
            family=family,
        )
        ui.show_table(histogram_table(report))
        ui.show_result("oracle_bleu", f"{report.oracle_bleu:.2f}")
        ui.show_result("baseline_bleu", f"{report.baseline_bleu:.2f}")
        ui.show_result("oracle_seconds", f"{report.oracle_seconds:.3f}")
        ui.show_result("baseline_seconds", f"{report.baseline_seconds:.3f}")
    finally:
        ui.cleanup()


def sizes_command(
    ctx: typer.Context,
    base: Annotated[
        bool, typer.Option("--base", help="6x6 model, d=512, 8 heads, d_ff=2048, 32k vocabulary")
    ] = False,
    enc_layers: EncLayersOption = None,
    dec_layers: DecLayersOption = None,
    out: OutOption = None,
) -> None:
    """Compare learnable and checkpoint sizes of tied, RS and per-combination models."""
    settings = get_settings(ctx, enc_layers=enc_layers, dec_layers=dec_layers)
    config = ModelConfig.transformer_base() if base else settings.model_settings()
    report = report_model_sizes(config)
    table = size_table(report)
    ui = select_ui()
    try:
        ui.show_table(table)
        ui.show_result("rs_fewer_than_vanilla_sum", f"{report.rs_fewer_than_vanilla_sum:.2f}")
        ui.show_result("rs_fewer_than_rs_sum", f"{report.rs_fewer_than_rs_sum:.2f}")
        if out is not None:
            write_json(out / SIZES_JSON, report)
            write_text(out / SIZES_TEXT, [table])
            write_csv(out / SIZES_CSV, table)
            ui.show_result("out", str(out))
    finally:
        ui.cleanup()


def report_command(
    ctx: typer.Context,
    run_dir: Annotated[
        Path,
        typer.Option("--run-dir", exists=True, file_okay=False, help="Directory of run artefacts"),
    ],
    out: OutOption = None,
) -> None:
    """Collect every report under a run directory into text and CSV tables."""
    get_settings(ctx)
    ui = select_ui()
    try:
        for path in write_report(run_dir, out or run_dir):
            ui.show_result("wrote", str(path))
    finally:
        ui.cleanup()
