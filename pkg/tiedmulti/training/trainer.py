"""Training loop for vanilla and tied-multi models."""

import math
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from tiedmulti.config.experiment import ModelConfig, TrainingConfig
from tiedmulti.core.kinds import ModelKind
from tiedmulti.core.models import TrainSummary
from tiedmulti.engine.tensor import Tensor, backward
from tiedmulti.model.checkpoint import save_checkpoint
from tiedmulti.model.transformer import Parameters, init_parameters
from tiedmulti.training.averaging import average_checkpoint_files
from tiedmulti.training.batching import EncodedPair, batch_indices, make_batch
from tiedmulti.training.losses import tied_multi_loss, vanilla_loss
from tiedmulti.training.optim import Adam, global_norm, inverse_sqrt_rate
from tiedmulti.utils.exceptions import NumericalError, TiedMultiError, VocabularyError
from tiedmulti.utils.logger import logger

StepCallback = Callable[[int, float], None]

TRAIN_LOG = "train_log.tsv"
SUMMARY = "train_summary.json"
AVERAGED = "averaged.ckpt"


@dataclass
class TrainingRun:
    """Result of `train`: final weights, retained checkpoints and the log."""

    params: Parameters
    checkpoints: list[Path] = field(default_factory=list)
    log_path: Path | None = None
    averaged_path: Path | None = None
    losses: list[float] = field(default_factory=list)
    seconds: float = 0.0


def check_lengths(pairs: Sequence[EncodedPair], config: ModelConfig) -> None:
    """Every sentence plus its end (or begin) marker must fit the positional horizon."""
    for k, (src, tgt) in enumerate(pairs):
        longest = max(len(src), len(tgt)) + 1
        if longest > config.max_len:
            raise VocabularyError(
                f"pair {k} needs {longest} positions, max_len is {config.max_len}"
            )
        if any(t >= config.vocab for t in (*src, *tgt)):
            raise VocabularyError(f"pair {k} has a token id outside vocabulary of {config.vocab}")


class Trainer:
    """Runs the optimisation loop and writes the log, checkpoints and summary."""

    def __init__(
        self,
        kind: ModelKind,
        model_config: ModelConfig,
        config: TrainingConfig,
        out_dir: Path | None = None,
        on_step: StepCallback | None = None,
    ) -> None:
        """
        Initialize the trainer.

        Args:
            kind: vanilla (single loss) or tied-multi (N x M losses)
            model_config: Architecture of the model to train
            config: Steps, batch size, schedule and checkpointing
            out_dir: Directory for the log and checkpoints; None keeps everything in memory
            on_step: Optional callback receiving (step, overall loss)
        """
        self.kind = kind
        self.model_config = model_config
        self.config = config
        self.out_dir = out_dir
        self._on_step = on_step

    def _loss(
        self, params: Parameters, pairs: Sequence[EncodedPair], rng: np.random.Generator
    ) -> tuple[Tensor, list[float]]:
        batch = make_batch(pairs)
        smoothing = self.config.label_smoothing
        dropout_rng = rng if self.model_config.dropout > 0 else None
        if self.kind == ModelKind.VANILLA:
            loss = vanilla_loss(batch, params, smoothing, dropout_rng)
            return loss, [loss.item()]
        grid = tied_multi_loss(
            batch, params, smoothing, aggregation=self.config.aggregation, rng=dropout_rng
        )
        return grid.overall, grid.row_major()

    def train(self, pairs: Sequence[EncodedPair], params: Parameters | None = None) -> TrainingRun:
        """
        Train from `params` (fresh weights from the seed when None).

        Deterministic given the seed: batches, initial weights and dropout
        masks all come from generators derived from `config.seed`.

        Raises:
            NumericalError: A loss or activation became non-finite; the message names the step.
        """
        cfg = self.config
        check_lengths(pairs, self.model_config)
        params = params or init_parameters(self.model_config, seed=cfg.seed)
        params.requires_grad_(True)
        optimizer = Adam(params.parameters())
        batches = batch_indices(len(pairs), cfg.batch_size, seed=cfg.seed + 1)
        dropout_rng = np.random.default_rng(cfg.seed + 2)
        run = TrainingRun(params=params)

        log_file = None
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            run.log_path = self.out_dir / TRAIN_LOG
            log_file = run.log_path.open("w", encoding="utf-8")

        logger.info(
            f"Training {self.kind} model ({self.model_config.enc_layers}x"
            f"{self.model_config.dec_layers}) on {len(pairs)} pairs for {cfg.steps} steps"
        )
        started = time.perf_counter()
        try:
            for step in range(1, cfg.steps + 1):
                chosen = [pairs[int(k)] for k in next(batches)]
                try:
                    loss, terms = self._loss(params, chosen, dropout_rng)
                except NumericalError as e:
                    raise NumericalError(f"step {step}: {e}") from e
                value = loss.item()
                if not math.isfinite(value):
                    raise NumericalError(f"non-finite loss {value} at step {step}")
                optimizer.zero_grad()
                backward(loss)
                lr = inverse_sqrt_rate(
                    step, self.model_config.d_model, cfg.warmup_steps, cfg.learning_rate
                )
                optimizer.step(lr)
                run.losses.append(value)

                if log_file is not None:
                    cells = [str(step), f"{value:.10g}", *(f"{t:.10g}" for t in terms)]
                    log_file.write("\t".join(cells) + "\n")
                    log_file.flush()
                logger.debug(
                    f"step {step} loss {value:.4f} lr {lr:.2e} "
                    f"|g| {global_norm(params.parameters()):.3f}"
                )
                if self._on_step:
                    self._on_step(step, value)
                due = step % cfg.checkpoint_every == 0 or step == cfg.steps
                if self.out_dir is not None and due:
                    self._save(params, step, run)
        finally:
            if log_file is not None:
                log_file.close()
        run.seconds = time.perf_counter() - started

        if self.out_dir is not None and run.checkpoints:
            run.averaged_path = self.out_dir / AVERAGED
            save_checkpoint(average_checkpoint_files(run.checkpoints), run.averaged_path)
            self._write_summary(run, len(pairs))
        logger.info(f"Finished training in {run.seconds:.1f}s, final loss {run.losses[-1]:.4f}")
        return run

    def _save(self, params: Parameters, step: int, run: TrainingRun) -> None:
        assert self.out_dir is not None
        path = save_checkpoint(params, self.out_dir / "checkpoints" / f"step-{step:07d}.ckpt")
        run.checkpoints.append(path)
        while len(run.checkpoints) > self.config.keep_last:
            run.checkpoints.pop(0).unlink(missing_ok=True)
        logger.debug(f"Checkpoint written: {path}")

    def _write_summary(self, run: TrainingRun, pairs: int) -> None:
        assert self.out_dir is not None
        summary = TrainSummary(
            kind=str(self.kind),
            model=self.model_config.model_dump(mode="json"),
            training=self.config.model_dump(mode="json"),
            pairs=pairs,
            steps=len(run.losses),
            final_loss=run.losses[-1],
            seconds=run.seconds,
            checkpoints=[p.name for p in run.checkpoints],
            averaged=run.averaged_path.name if run.averaged_path else None,
        )
        summary_path = self.out_dir / SUMMARY
        summary_path.write_text(summary.model_dump_json(indent=2) + "\n", encoding="utf-8")


def train(
    kind: ModelKind,
    pairs: Sequence[EncodedPair],
    config: TrainingConfig,
    model_config: ModelConfig,
    out_dir: Path | None = None,
    on_step: StepCallback | None = None,
) -> TrainingRun:
    """Train one model; see `Trainer.train`."""
    try:
        return Trainer(kind, model_config, config, out_dir, on_step).train(pairs)
    except OSError as e:
        raise TiedMultiError(f"training output could not be written: {e}") from e
