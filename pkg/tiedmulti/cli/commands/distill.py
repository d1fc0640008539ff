"""`distill`: sequence-level distillation into tied and tied-RS children."""

from pathlib import Path
from typing import Annotated

import typer

from tiedmulti.adapters.data.corpus import read_corpus
from tiedmulti.cli.common import (
    AlphaOption,
    BeamOption,
    OutOption,
    SeedOption,
    WorkersOption,
    get_settings,
    resolve_out,
)
from tiedmulti.cli.ui import select_ui
from tiedmulti.core.kinds import ChildKind
from tiedmulti.model.checkpoint import load_checkpoint
from tiedmulti.services.data import find_vocabulary, load_encoded
from tiedmulti.services.distillation import distillation_table, run_distillation_pipeline


def distill_command(
    ctx: typer.Context,
    parent: Annotated[
        Path, typer.Option("--parent", exists=True, dir_okay=False, help="Parent checkpoint")
    ],
    train_file: Annotated[
        Path,
        typer.Option("--train", exists=True, dir_okay=False, help="Training corpus to distil"),
    ],
    test: Annotated[
        Path, typer.Option("--test", exists=True, dir_okay=False, help="Held-out corpus")
    ],
    child: Annotated[
        list[ChildKind] | None,
        typer.Option("--child", help="Child kind, repeatable (tied, tied-rs); default both"),
    ] = None,
    distill: Annotated[
        bool,
        typer.Option("--distill/--no-distill", help="Also train on the parent's translations"),
    ] = True,
    steps: Annotated[int | None, typer.Option("--steps", min=1)] = None,
    beam: BeamOption = None,
    alpha: AlphaOption = None,
    workers: WorkersOption = None,
    seed: SeedOption = None,
    out: OutOption = None,
) -> None:
    """Train children on the corpus and on the parent's beam output; compare greedy and beam."""
    settings = get_settings(
        ctx, steps=steps, beam=beam, alpha=alpha, workers=workers, seed=seed
    )
    vocab = find_vocabulary(train_file)
    model = load_checkpoint(parent)
    _, corpus = load_encoded(train_file, vocab)
    kinds = child or list(ChildKind)
    out_dir = resolve_out(settings, out, "distill")
    ui = select_ui()
    try:
        ui.show_step(f"Distilling into {', '.join(str(k) for k in kinds)}")
        report = run_distillation_pipeline(
            model,
            corpus,
            read_corpus(test),
            vocab,
            kinds,
            settings.training_settings(),
            settings.beam_settings(),
            out_dir,
            distill=distill,
            workers=settings.workers,
        )
        ui.show_table(distillation_table(report))
        ui.show_result("pseudo_pairs", str(report.pseudo_pairs))
        ui.show_result("skipped", str(report.skipped))
        ui.show_result("out", str(out_dir))
    finally:
        ui.cleanup()
