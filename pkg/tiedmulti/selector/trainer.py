"""Training the combination classifier with Nesterov-momentum SGD."""

import itertools
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from tiedmulti.config.experiment import SelectorConfig
from tiedmulti.core.models import MultiLabelExample
from tiedmulti.engine.tensor import backward, no_grad
from tiedmulti.selector.losses import ClassWeights, class_weights, selector_loss
from tiedmulti.selector.model import SelectorParameters, selector_probabilities
from tiedmulti.training.optim import NesterovSGD
from tiedmulti.utils.exceptions import ConfigurationError, NumericalError
from tiedmulti.utils.logger import logger

GRID_ALPHA = (0.5, 1.0, 2.0)
GRID_BETA = (1.0, 2.0)
GRID_LAMBDA = (0.25, 0.5, 0.75)
VALIDATION_SHARE = 0.1


@dataclass(frozen=True)
class ClassifierScores:
    """Macro-averaged scores of thresholded predictions."""

    precision: float
    recall: float
    f_beta: float


@dataclass(frozen=True)
class EpochReport:
    epoch: int
    loss: float
    scores: ClassifierScores


@dataclass
class SelectorRun:
    params: SelectorParameters
    weights: ClassWeights
    epochs: list[EpochReport] = field(default_factory=list)
    validation_loss: float | None = None


EpochCallback = Callable[[EpochReport], None]
SelectorFactory = Callable[[SelectorConfig], SelectorParameters]


def macro_scores(
    probs: NDArray[np.float64], labels: NDArray[np.float64], threshold: float, beta: float
) -> ClassifierScores:
    """
    Per-class precision, recall and F_beta averaged over classes.

    Classes never predicted and never labelled are left out of the
    average; a class with no predicted (or no true) positives scores 0
    precision (or recall).
    """
    predicted = probs >= threshold
    actual = labels > 0.5
    tp = np.sum(predicted & actual, axis=0).astype(np.float64)
    fp = np.sum(predicted & ~actual, axis=0).astype(np.float64)
    fn = np.sum(~predicted & actual, axis=0).astype(np.float64)
    active = (tp + fp + fn) > 0
    if not np.any(active):
        return ClassifierScores(precision=1.0, recall=1.0, f_beta=1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(tp + fp > 0, tp / (tp + fp), 0.0)
        recall = np.where(tp + fn > 0, tp / (tp + fn), 0.0)
        b2 = beta * beta
        denominator = b2 * precision + recall
        f = np.where(denominator > 0, (1 + b2) * precision * recall / denominator, 0.0)
    return ClassifierScores(
        precision=float(precision[active].mean()),
        recall=float(recall[active].mean()),
        f_beta=float(f[active].mean()),
    )


def _stack(examples: Sequence[MultiLabelExample]) -> tuple[list[list[int]], NDArray[np.float64]]:
    tokens = [ex.tokens for ex in examples]
    labels = np.asarray([ex.labels for ex in examples], dtype=np.float64)
    return tokens, labels


def predict(
    examples: Sequence[MultiLabelExample], params: SelectorParameters, batch_size: int = 64
) -> NDArray[np.float64]:
    """(B, K) probabilities, computed without recording gradients."""
    out = []
    with no_grad():
        for start in range(0, len(examples), batch_size):
            chunk = [ex.tokens for ex in examples[start : start + batch_size]]
            out.append(np.asarray(selector_probabilities(chunk, params).data, dtype=np.float64))
    return np.concatenate(out, axis=0)


def evaluate_loss(
    examples: Sequence[MultiLabelExample],
    params: SelectorParameters,
    config: SelectorConfig,
    weights: ClassWeights,
) -> float:
    """Example-weighted mean loss over `examples`."""
    total, count = 0.0, 0
    with no_grad():
        for start in range(0, len(examples), config.batch_size):
            chunk = examples[start : start + config.batch_size]
            tokens, labels = _stack(chunk)
            probs = selector_probabilities(tokens, params)
            sample = [ex.sample_weight for ex in chunk]
            total += selector_loss(probs, labels, config, weights, sample).item() * len(chunk)
            count += len(chunk)
    return total / count


def train_selector(
    examples: Sequence[MultiLabelExample],
    config: SelectorConfig,
    params: SelectorParameters,
    validation: Sequence[MultiLabelExample] | None = None,
    weights: ClassWeights | None = None,
    on_epoch: EpochCallback | None = None,
) -> SelectorRun:
    """
    Mini-batch SGD with Nesterov momentum over `examples`.

    Batches are drawn from a generator seeded with `config.seed`, so runs
    repeat exactly. Class weights default to the label frequencies of
    `examples`.

    Raises:
        ConfigurationError: `examples` is empty or its label width differs from the model's.
        NumericalError: The loss became non-finite; the message names the epoch and batch.
    """
    if not examples:
        raise ConfigurationError("selector training needs at least one example")
    K = params.classes
    if any(len(ex.labels) != K for ex in examples):
        raise ConfigurationError(f"every label vector must have {K} entries")
    tokens_all, labels_all = _stack(examples)
    weights = weights or class_weights(labels_all.sum(axis=0).astype(np.int64), config.alpha)
    optimizer = NesterovSGD(params.parameters(), momentum=config.momentum)
    rng = np.random.default_rng(config.seed + 1)
    run = SelectorRun(params=params, weights=weights)

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(examples))
        for batch_no, start in enumerate(range(0, len(order), config.batch_size), start=1):
            rows = order[start : start + config.batch_size]
            chosen = [examples[int(r)] for r in rows]
            probs = selector_probabilities([tokens_all[int(r)] for r in rows], params)
            loss = selector_loss(
                probs, labels_all[rows], config, weights, [ex.sample_weight for ex in chosen]
            )
            value = loss.item()
            if not math.isfinite(value):
                raise NumericalError(
                    f"selector loss {value} at epoch {epoch}, batch {batch_no}"
                )
            optimizer.zero_grad()
            backward(loss)
            optimizer.step(config.learning_rate)

        probs_all = predict(examples, params)
        report = EpochReport(
            epoch=epoch,
            loss=evaluate_loss(examples, params, config, weights),
            scores=macro_scores(probs_all, labels_all, config.threshold, config.beta),
        )
        run.epochs.append(report)
        logger.debug(
            f"selector epoch {epoch}: loss {report.loss:.4f} P {report.scores.precision:.3f} "
            f"R {report.scores.recall:.3f} F {report.scores.f_beta:.3f}"
        )
        if on_epoch:
            on_epoch(report)

    if validation:
        run.validation_loss = evaluate_loss(validation, params, config, weights)
    return run


def split_validation(
    examples: Sequence[MultiLabelExample], seed: int, share: float = VALIDATION_SHARE
) -> tuple[list[MultiLabelExample], list[MultiLabelExample]]:
    """Seeded shuffle, then hold out `share` of the examples (at least one)."""
    if len(examples) < 2:
        raise ConfigurationError("a validation split needs at least two examples")
    order = np.random.default_rng(seed).permutation(len(examples))
    held = max(1, int(round(share * len(examples))))
    return (
        [examples[int(i)] for i in order[held:]],
        [examples[int(i)] for i in order[:held]],
    )


def grid_points(base: SelectorConfig) -> list[SelectorConfig]:
    return [
        base.model_copy(update={"alpha": a, "beta": b, "interpolation": lam})
        for a, b, lam in itertools.product(GRID_ALPHA, GRID_BETA, GRID_LAMBDA)
    ]


def grid_search(
    examples: Sequence[MultiLabelExample],
    validation: Sequence[MultiLabelExample],
    base: SelectorConfig,
    make_params: SelectorFactory,
) -> tuple[SelectorConfig, SelectorRun]:
    """
    Train one classifier per (alpha, beta, lambda) point and keep the best.

    Every candidate is compared on the loss defined by `base`, with class
    weights from the training labels, so the comparison does not depend on
    the point's own loss scale.
    """
    _, labels = _stack(examples)
    reference_weights = class_weights(labels.sum(axis=0).astype(np.int64), base.alpha)
    best: tuple[float, SelectorConfig, SelectorRun] | None = None
    for point in grid_points(base):
        run = train_selector(examples, point, make_params(point))
        score = evaluate_loss(validation, run.params, base, reference_weights)
        run.validation_loss = score
        logger.info(
            f"alpha={point.alpha} beta={point.beta} lambda={point.interpolation}: "
            f"validation loss {score:.4f}"
        )
        if best is None or score < best[0]:
            best = (score, point, run)
    assert best is not None
    return best[1], best[2]
