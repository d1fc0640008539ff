"""Training runs: a single model, the vanilla grid, and training-time accounting."""

from collections.abc import Sequence
from pathlib import Path

from pydantic import ValidationError

from tiedmulti.config.experiment import ModelConfig, TrainingConfig
from tiedmulti.core.kinds import ModelKind
from tiedmulti.core.models import (
    LayerCombination,
    TrainingTimeReport,
    TrainSummary,
    all_combinations,
)
from tiedmulti.model.checkpoint import load_checkpoint
from tiedmulti.model.transformer import Parameters
from tiedmulti.training.batching import EncodedPair
from tiedmulti.training.trainer import AVERAGED, SUMMARY, StepCallback, TrainingRun, train
from tiedmulti.utils.exceptions import CheckpointError, CorpusError
from tiedmulti.utils.logger import logger


def vanilla_dir_for(root: Path, combo: LayerCombination) -> Path:
    return root / f"n{combo.n}-m{combo.m}"


def train_vanilla_grid(
    pairs: Sequence[EncodedPair],
    config: TrainingConfig,
    model_config: ModelConfig,
    out_dir: Path,
    on_step: StepCallback | None = None,
) -> dict[LayerCombination, TrainingRun]:
    """
    One vanilla model per combination (n, m), each n encoder and m decoder layers deep.

    Every model gets the same step and batch budget and the same seed.
    """
    runs = {}
    for combo in all_combinations(model_config.enc_layers, model_config.dec_layers):
        logger.info(f"Vanilla grid: training ({combo})")
        runs[combo] = train(
            ModelKind.VANILLA,
            pairs,
            config,
            model_config.with_depth(combo.n, combo.m),
            vanilla_dir_for(out_dir, combo),
            on_step,
        )
    return runs


def load_vanilla_grid(
    root: Path, enc_layers: int, dec_layers: int
) -> dict[LayerCombination, Parameters]:
    """Averaged checkpoints written by `train_vanilla_grid`."""
    grid = {}
    for combo in all_combinations(enc_layers, dec_layers):
        params = load_checkpoint(vanilla_dir_for(root, combo) / AVERAGED)
        if (params.config.enc_layers, params.config.dec_layers) != (combo.n, combo.m):
            raise CheckpointError(f"vanilla model for ({combo}) has the wrong depth")
        grid[combo] = params
    return grid


def read_summary(path: Path) -> TrainSummary:
    try:
        return TrainSummary.model_validate_json(path.read_text(encoding="utf-8"))
    except (OSError, ValidationError) as e:
        raise CorpusError(f"cannot read training summary {path}: {e}") from e


def find_summaries(root: Path) -> list[tuple[Path, TrainSummary]]:
    return [(p, read_summary(p)) for p in sorted(root.rglob(SUMMARY))]


def _depth(summary: TrainSummary) -> tuple[int, int]:
    return int(summary.model["enc_layers"]), int(summary.model["dec_layers"])


def training_time_report(
    summaries: Sequence[tuple[Path, TrainSummary]],
) -> TrainingTimeReport | None:
    """
    Ratios of the vanilla-grid total and of the tied-multi run to the deepest vanilla run.

    The grid is the directory holding the deepest vanilla run. The tied-multi
    run compared against it has the same depth and sits beside that grid in
    the same run directory, so distillation children are never picked.

    Returns None when no vanilla run is among `summaries`.
    """
    vanilla = [(p, s) for p, s in summaries if s.kind == ModelKind.VANILLA]
    if not vanilla:
        return None
    # First deepest run in path order.
    deepest_path, deepest = max(vanilla, key=lambda item: _depth(item[1]))
    if deepest.seconds <= 0:
        return None
    grid_dir = deepest_path.parent.parent
    grid = [s for p, s in vanilla if p.parent.parent == grid_dir]
    tied = [
        s
        for p, s in summaries
        if s.kind == ModelKind.TIED_MULTI
        and not s.model.get("recurrent_stacking", False)
        and _depth(s) == _depth(deepest)
        and p.parent.parent == grid_dir.parent
    ]
    grid_seconds = sum(s.seconds for s in grid)
    tied_seconds = tied[0].seconds if tied else None
    return TrainingTimeReport(
        reference_seconds=deepest.seconds,
        vanilla_grid_seconds=grid_seconds,
        vanilla_grid_models=len(grid),
        tied_seconds=tied_seconds,
        vanilla_grid_ratio=grid_seconds / deepest.seconds,
        tied_ratio=None if tied_seconds is None else tied_seconds / deepest.seconds,
    )
