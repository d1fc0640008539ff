"""Selector commands: `build-selector-data`, `train-selector` and `select-decode`."""

from collections.abc import Sequence
from pathlib import Path
from typing import Annotated

import typer

from tiedmulti.adapters.data.corpus import read_corpus
from tiedmulti.adapters.reports.tables import ReportTable, write_csv, write_text
from tiedmulti.cli.common import (
    AlphaOption,
    BeamOption,
    ModeOption,
    OutOption,
    SeedOption,
    WorkersOption,
    get_settings,
    resolve_out,
)
from tiedmulti.cli.ui import StageProgress, select_ui
from tiedmulti.config.experiment import SelectorConfig
from tiedmulti.core.models import LayerCombination
from tiedmulti.metrics.gridfile import write_grid_file
from tiedmulti.model.checkpoint import load_checkpoint
from tiedmulti.selector.dataset import (
    build_selector_dataset,
    read_selector_dataset,
    write_selector_dataset,
)
from tiedmulti.selector.model import (
    SelectorParameters,
    load_selector,
    save_selector,
    selector_for_model,
)
from tiedmulti.selector.trainer import (
    EpochReport,
    grid_search,
    split_validation,
    train_selector,
)
from tiedmulti.services.data import VOCAB_FILE, find_vocabulary
from tiedmulti.services.selection import run_select_decode, selection_table
from tiedmulti.utils.exceptions import CombinationError

SELECTOR_DATA = "selector_data.tsv"
SELECTOR_GRID = "selector_grid.tsv"
SELECTOR_CKPT = "selector.ckpt"
EPOCHS_TEXT = "selector_epochs.txt"
EPOCHS_CSV = "selector_epochs.csv"

CheckpointOption = Annotated[
    Path,
    typer.Option("--checkpoint", exists=True, dir_okay=False, help="Tied-multi checkpoint"),
]
DataFile = Annotated[
    Path,
    typer.Option(
        "--data", exists=True, dir_okay=False, help="Selector data from build-selector-data"
    ),
]


def epochs_table(epochs: Sequence[EpochReport], beta: float) -> ReportTable:
    table = ReportTable(
        title=f"Selector training (macro scores, beta={beta})",
        headers=["epoch", "loss", "precision", "recall", "f_beta"],
    )
    for e in epochs:
        table.add_row(
            e.epoch,
            f"{e.loss:.6f}",
            f"{e.scores.precision:.4f}",
            f"{e.scores.recall:.4f}",
            f"{e.scores.f_beta:.4f}",
        )
    return table


def build_selector_data_command(
    ctx: typer.Context,
    checkpoint: CheckpointOption,
    corpus: Annotated[
        Path,
        typer.Option("--corpus", exists=True, dir_okay=False, help="Corpus (source<TAB>target)"),
    ],
    mode: ModeOption = None,
    beam: BeamOption = None,
    alpha: AlphaOption = None,
    workers: WorkersOption = None,
    out: OutOption = None,
) -> None:
    """Label each sentence with its chrF-best combinations for selector training."""
    settings = get_settings(ctx, mode=mode, beam=beam, alpha=alpha, workers=workers)
    vocab = find_vocabulary(corpus)
    model = load_checkpoint(checkpoint)
    pairs = read_corpus(corpus)
    out_dir = resolve_out(settings, out, "selector")
    ui = select_ui()
    try:
        ui.show_step(
            f"Decoding {len(pairs)} sentences at {model.config.combinations} combinations"
        )
        dataset = build_selector_dataset(
            model, pairs, vocab, settings.beam_settings(), settings.mode, settings.workers
        )
        data_path = write_selector_dataset(out_dir / SELECTOR_DATA, dataset)
        vocab.save(out_dir / VOCAB_FILE)
        if dataset.grids:
            write_grid_file(out_dir / SELECTOR_GRID, dataset.grids)
        ui.show_result("examples", str(len(dataset.examples)))
        ui.show_result("failures", str(dataset.failures))
        ui.show_result("data", str(data_path))
    finally:
        ui.cleanup()


def train_selector_command(
    ctx: typer.Context,
    data: DataFile,
    checkpoint: CheckpointOption,
    validation: Annotated[
        Path | None,
        typer.Option(
            "--validation", exists=True, dir_okay=False, help="Held-out selector data"
        ),
    ] = None,
    grid: Annotated[
        bool,
        typer.Option("--grid", help="Search alpha, beta and lambda; keep the best validation loss"),
    ] = False,
    fine_tune: Annotated[
        Path | None,
        typer.Option(
            "--fine-tune", exists=True, dir_okay=False, help="Continue training on this dataset"
        ),
    ] = None,
    epochs: Annotated[int | None, typer.Option("--epochs", min=1)] = None,
    loss_alpha: Annotated[
        float | None, typer.Option("--loss-alpha", min=0.0, help="Class-weight exponent")
    ] = None,
    beta: Annotated[float | None, typer.Option("--beta", help="F-measure weight")] = None,
    interpolation: Annotated[
        float | None, typer.Option("--lambda", min=0.0, max=1.0, help="BCE share of the loss")
    ] = None,
    seed: SeedOption = None,
    out: OutOption = None,
) -> None:
    """Train the layer-combination classifier, initialised from the model's embeddings."""
    settings = get_settings(
        ctx,
        selector_epochs=epochs,
        selector_alpha=loss_alpha,
        selector_beta=beta,
        selector_lambda=interpolation,
        seed=seed,
    )
    config = settings.selector_settings()
    vocab = find_vocabulary(data)
    model = load_checkpoint(checkpoint)
    dataset = read_selector_dataset(data, vocab)
    mc = model.config
    if (dataset.enc_layers, dataset.dec_layers) != (mc.enc_layers, mc.dec_layers):
        raise CombinationError(
            f"selector data is labelled for {dataset.enc_layers}x{dataset.dec_layers} "
            f"combinations, model has {mc.enc_layers}x{mc.dec_layers}"
        )
    out_dir = resolve_out(settings, out, "selector")
    ui = select_ui()

    def on_epoch(report: EpochReport) -> None:
        ui.show_progress(
            StageProgress(
                "Selector", report.epoch, config.epochs, f"F_beta {report.scores.f_beta:.3f}"
            )
        )

    def make_params(point: SelectorConfig) -> SelectorParameters:
        return selector_for_model(point, model)

    try:
        examples = dataset.examples
        held_out = read_selector_dataset(validation, vocab).examples if validation else None
        if grid:
            if held_out is None:
                examples, held_out = split_validation(examples, config.seed)
            ui.show_step(f"Grid search over {len(examples)} examples")
            config, run = grid_search(examples, held_out, config, make_params)
            ui.show_result("alpha", str(config.alpha))
            ui.show_result("beta", str(config.beta))
            ui.show_result("lambda", str(config.interpolation))
        else:
            ui.show_step(f"Training selector on {len(examples)} examples")
            run = train_selector(
                examples, config, make_params(config), validation=held_out, on_epoch=on_epoch
            )
        history = list(run.epochs)
        if fine_tune is not None:
            extra = read_selector_dataset(fine_tune, vocab).examples
            ui.show_step(f"Fine-tuning on {len(extra)} examples")
            run = train_selector(
                extra, config, run.params, validation=held_out, on_epoch=on_epoch
            )
            history += run.epochs
        path = save_selector(run.params, out_dir / SELECTOR_CKPT)
        table = epochs_table(history, config.beta)
        write_text(out_dir / EPOCHS_TEXT, [table])
        write_csv(out_dir / EPOCHS_CSV, table)
        ui.show_table(table)
        if run.validation_loss is not None:
            ui.show_result("validation_loss", f"{run.validation_loss:.6f}")
        ui.show_result("selector", str(path))
    finally:
        ui.cleanup()


def select_decode_command(
    ctx: typer.Context,
    checkpoint: CheckpointOption,
    selector: Annotated[
        Path, typer.Option("--selector", exists=True, dir_okay=False, help="Selector checkpoint")
    ],
    test: Annotated[
        Path,
        typer.Option("--test", exists=True, dir_okay=False, help="Corpus (source<TAB>target)"),
    ],
    decode_dir: Annotated[
        Path | None,
        typer.Option(
            "--decode-dir",
            exists=True,
            file_okay=False,
            help="Cost-benefit decode logs for the baseline and oracle",
        ),
    ] = None,
    threshold: Annotated[
        float | None, typer.Option("--threshold", min=0.0, max=1.0, help="Decision threshold")
    ] = None,
    mode: ModeOption = None,
    beam: BeamOption = None,
    alpha: AlphaOption = None,
    out: OutOption = None,
) -> None:
    """Decode each sentence at the combination the selector predicts."""
    settings = get_settings(
        ctx, mode=mode, beam=beam, alpha=alpha, selector_threshold=threshold
    )
    vocab = find_vocabulary(test)
    model = load_checkpoint(checkpoint)
    classifier = load_selector(selector, settings.selector_settings())
    out_dir = resolve_out(settings, out, "select-decode")
    ui = select_ui()
    try:
        pairs = read_corpus(test)
        ui.show_step(f"Selecting and decoding {len(pairs)} sentences")
        report = run_select_decode(
            model,
            classifier,
            pairs,
            vocab,
            settings.mode,
            settings.beam_settings(),
            settings.selector_threshold,
            out_dir,
            decode_dir=decode_dir,
        )
        mc = model.config
        ui.show_table(selection_table(report, LayerCombination(n=mc.enc_layers, m=mc.dec_layers)))
        ui.show_result("backoffs", str(report.backoffs))
        ui.show_result("out", str(out_dir))
    finally:
        ui.cleanup()
