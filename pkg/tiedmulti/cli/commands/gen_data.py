"""`gen-data`: write a synthetic parallel corpus."""

from typing import Annotated

import typer

from tiedmulti.cli.common import OutOption, SeedOption, get_settings, resolve_out
from tiedmulti.cli.ui import select_ui
from tiedmulti.core.kinds import ToyTask
from tiedmulti.services.data import write_toy_data


def gen_data_command(
    ctx: typer.Context,
    task: Annotated[
        ToyTask | None, typer.Option("--task", help="copy, reverse, rot or sort")
    ] = None,
    symbols: Annotated[int | None, typer.Option("--symbols", min=1)] = None,
    min_len: Annotated[int | None, typer.Option("--min-len", min=1)] = None,
    max_len: Annotated[int | None, typer.Option("--max-len", min=1)] = None,
    size: Annotated[int | None, typer.Option("--size", min=10, help="Sentence count")] = None,
    rot_k: Annotated[int | None, typer.Option("--rot-k", min=0)] = None,
    seed: SeedOption = None,
    out: OutOption = None,
) -> None:
    """Generate a toy translation task and split it 90/10 into train and test."""
    settings = get_settings(
        ctx,
        task=task,
        task_symbols=symbols,
        task_min_len=min_len,
        task_max_len=max_len,
        task_size=size,
        rot_k=rot_k,
        seed=seed,
    )
    spec = settings.toy_settings()
    out_dir = resolve_out(settings, out, "data")
    ui = select_ui()
    try:
        if not spec.fits(settings.model_settings()):
            ui.show_warning(
                f"Sentences up to {spec.max_len} symbols may not fit a model with "
                f"max_len={settings.max_len}"
            )
        ui.show_step(f"Generating {spec.size} {spec.task} sentences")
        files = write_toy_data(spec, out_dir)
        ui.show_result("train", str(files.train))
        ui.show_result("test", str(files.test))
        ui.show_result("vocab", str(files.vocab))
    finally:
        ui.cleanup()
