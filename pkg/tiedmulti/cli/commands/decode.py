"""`decode` and `evaluate`: one layer combination of a trained model."""

from pathlib import Path
from typing import Annotated

import typer

from tiedmulti.adapters.data.corpus import read_corpus
from tiedmulti.cli.common import (
    AlphaOption,
    BeamOption,
    ComboOption,
    ModeOption,
    OutOption,
    get_settings,
    resolve_out,
)
from tiedmulti.cli.ui import select_ui
from tiedmulti.core.models import LayerCombination
from tiedmulti.decoding.timed import read_decode_log, total_seconds
from tiedmulti.model.checkpoint import load_checkpoint
from tiedmulti.model.transformer import Parameters
from tiedmulti.services.data import find_vocabulary
from tiedmulti.services.evaluation import decode_and_log, decode_log_path, evaluate_records

CheckpointOption = Annotated[
    Path | None,
    typer.Option("--checkpoint", exists=True, dir_okay=False, help="Model checkpoint"),
]
TestFile = Annotated[
    Path,
    typer.Option("--test", exists=True, dir_okay=False, help="Corpus (source<TAB>target)"),
]
VocabFile = Annotated[
    Path | None,
    typer.Option(
        "--vocab", exists=True, dir_okay=False, help="Defaults to vocab.txt beside --test"
    ),
]


def _full_depth(params: Parameters, combo: LayerCombination | None) -> LayerCombination:
    mc = params.config
    return combo or LayerCombination(n=mc.enc_layers, m=mc.dec_layers)


def decode_command(
    ctx: typer.Context,
    checkpoint: Annotated[
        Path, typer.Option("--checkpoint", exists=True, dir_okay=False, help="Model checkpoint")
    ],
    test: TestFile,
    vocab_file: VocabFile = None,
    combo: ComboOption = None,
    mode: ModeOption = None,
    beam: BeamOption = None,
    alpha: AlphaOption = None,
    out: OutOption = None,
) -> None:
    """Translate the source side of a corpus at one (n, m) and write a timed decode log."""
    settings = get_settings(ctx, mode=mode, beam=beam, alpha=alpha)
    vocab = find_vocabulary(test, vocab_file)
    params = load_checkpoint(checkpoint)
    chosen = _full_depth(params, combo)
    sources = [vocab.encode(p.source) for p in read_corpus(test)]
    log_path = decode_log_path(resolve_out(settings, out, "decode"), chosen)
    ui = select_ui()
    try:
        ui.show_step(f"Decoding {len(sources)} sentences at ({chosen}) with {settings.mode}")
        records = decode_and_log(
            params, chosen, sources, vocab, settings.mode, settings.beam_settings(), log_path
        )
        ui.show_result("log", str(log_path))
        ui.show_result("failures", str(sum(r.error is not None for r in records)))
        ui.show_result("seconds", f"{total_seconds(records):.3f}")
    finally:
        ui.cleanup()


def evaluate_command(
    ctx: typer.Context,
    test: TestFile,
    checkpoint: CheckpointOption = None,
    log: Annotated[
        Path | None,
        typer.Option("--log", exists=True, dir_okay=False, help="Score an existing decode log"),
    ] = None,
    vocab_file: VocabFile = None,
    combo: ComboOption = None,
    mode: ModeOption = None,
    beam: BeamOption = None,
    alpha: AlphaOption = None,
) -> None:
    """Corpus BLEU and chrF of one combination against the corpus targets."""
    if (checkpoint is None) == (log is None):
        raise typer.BadParameter("give exactly one of --checkpoint or --log")
    settings = get_settings(ctx, mode=mode, beam=beam, alpha=alpha)
    pairs = read_corpus(test)
    ui = select_ui()
    try:
        if log is not None:
            records = read_decode_log(log)
        else:
            assert checkpoint is not None
            vocab = find_vocabulary(test, vocab_file)
            params = load_checkpoint(checkpoint)
            chosen = _full_depth(params, combo)
            ui.show_step(f"Decoding {len(pairs)} sentences at ({chosen})")
            records = decode_and_log(
                params,
                chosen,
                [vocab.encode(p.source) for p in pairs],
                vocab,
                settings.mode,
                settings.beam_settings(),
            )
        result = evaluate_records(records, [p.target for p in pairs])
        ui.show_result("bleu", f"{result.bleu:.2f}")
        ui.show_result("chrf", f"{result.chrf:.4f}")
        ui.show_result("sentences", str(result.sentences))
        ui.show_result("failures", str(result.failures))
        ui.show_result("seconds", f"{result.total_seconds:.3f}")
    finally:
        ui.cleanup()
