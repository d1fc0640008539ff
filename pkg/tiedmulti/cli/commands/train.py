"""`train` and `train-vanilla-grid`."""

from pathlib import Path
from typing import Annotated

import typer

from tiedmulti.cli.common import (
    DecLayersOption,
    EncLayersOption,
    OutOption,
    RsOption,
    SeedOption,
    get_settings,
    resolve_out,
)
from tiedmulti.cli.ui import StageProgress, UIOutput, select_ui
from tiedmulti.config.experiment import ModelConfig
from tiedmulti.config.settings import Settings
from tiedmulti.core.kinds import ModelKind
from tiedmulti.services.data import find_vocabulary, load_encoded
from tiedmulti.services.training import train_vanilla_grid
from tiedmulti.training.batching import EncodedPair
from tiedmulti.training.trainer import StepCallback, train

TrainFile = Annotated[
    Path,
    typer.Option(
        "--train", exists=True, dir_okay=False, help="Training corpus (source<TAB>target)"
    ),
]
VocabFile = Annotated[
    Path | None,
    typer.Option(
        "--vocab", exists=True, dir_okay=False, help="Defaults to vocab.txt beside --train"
    ),
]
StepsOption = Annotated[int | None, typer.Option("--steps", min=1)]
BatchOption = Annotated[int | None, typer.Option("--batch-size", min=1)]


def _prepare(
    settings: Settings, train_file: Path, vocab_file: Path | None
) -> tuple[ModelConfig, list[EncodedPair]]:
    vocab = find_vocabulary(train_file, vocab_file)
    _, pairs = load_encoded(train_file, vocab)
    model_config = settings.model_settings().model_copy(update={"vocab": vocab.size})
    return model_config, pairs


def _progress(ui: UIOutput, label: str, total: int) -> StepCallback:
    def on_step(step: int, loss: float) -> None:
        ui.show_progress(StageProgress(label, step, total, f"loss {loss:.4f}"))

    return on_step


def train_command(
    ctx: typer.Context,
    train_file: TrainFile,
    vocab_file: VocabFile = None,
    kind: Annotated[
        ModelKind, typer.Option("--kind", help="vanilla or tied-multi")
    ] = ModelKind.TIED_MULTI,
    enc_layers: EncLayersOption = None,
    dec_layers: DecLayersOption = None,
    rs: RsOption = False,
    steps: StepsOption = None,
    batch_size: BatchOption = None,
    seed: SeedOption = None,
    out: OutOption = None,
) -> None:
    """Train a vanilla or tied-multi model; writes a log, checkpoints and their average."""
    settings = get_settings(
        ctx,
        enc_layers=enc_layers,
        dec_layers=dec_layers,
        recurrent_stacking=True if rs else None,
        steps=steps,
        batch_size=batch_size,
        seed=seed,
    )
    model_config, pairs = _prepare(settings, train_file, vocab_file)
    training = settings.training_settings()
    out_dir = resolve_out(settings, out, str(kind))
    ui = select_ui()
    try:
        ui.show_step(f"Training {kind} model on {len(pairs)} pairs")
        run = train(
            kind, pairs, training, model_config, out_dir, _progress(ui, "Training", training.steps)
        )
        ui.show_result("final_loss", f"{run.losses[-1]:.6f}")
        ui.show_result("seconds", f"{run.seconds:.3f}")
        if run.averaged_path is not None:
            ui.show_result("checkpoint", str(run.averaged_path))
    finally:
        ui.cleanup()


def train_vanilla_grid_command(
    ctx: typer.Context,
    train_file: TrainFile,
    vocab_file: VocabFile = None,
    enc_layers: EncLayersOption = None,
    dec_layers: DecLayersOption = None,
    rs: RsOption = False,
    steps: StepsOption = None,
    batch_size: BatchOption = None,
    seed: SeedOption = None,
    out: OutOption = None,
) -> None:
    """Train one vanilla model per layer combination under the same budget."""
    settings = get_settings(
        ctx,
        enc_layers=enc_layers,
        dec_layers=dec_layers,
        recurrent_stacking=True if rs else None,
        steps=steps,
        batch_size=batch_size,
        seed=seed,
    )
    model_config, pairs = _prepare(settings, train_file, vocab_file)
    training = settings.training_settings()
    out_dir = resolve_out(settings, out, "vanilla")
    ui = select_ui()
    try:
        ui.show_step(f"Training {model_config.combinations} vanilla models")
        runs = train_vanilla_grid(
            pairs, training, model_config, out_dir, _progress(ui, "Training", training.steps)
        )
        for combo, run in runs.items():
            ui.show_result(str(combo), f"loss {run.losses[-1]:.6f} in {run.seconds:.3f}s")
        ui.show_result("out", str(out_dir))
    finally:
        ui.cleanup()
