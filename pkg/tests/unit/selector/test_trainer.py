"""Tests for classifier training, macro scores and the hyper-parameter grid."""

import numpy as np
import pytest

from tiedmulti.config.experiment import SelectorConfig
from tiedmulti.core.models import MultiLabelExample
from tiedmulti.selector.model import SelectorParameters, init_selector
from tiedmulti.selector.trainer import (
    GRID_ALPHA,
    GRID_BETA,
    GRID_LAMBDA,
    EpochReport,
    grid_points,
    grid_search,
    macro_scores,
    predict,
    split_validation,
    train_selector,
)
from tiedmulti.utils.exceptions import ConfigurationError

K = 4


def _examples(count: int, seed: int) -> list[MultiLabelExample]:
    """The label is the first token; the rest of the sentence is noise."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        first = int(rng.integers(4, 4 + K))
        tail = rng.integers(8, 12, size=int(rng.integers(0, 3))).tolist()
        labels = [0] * K
        labels[first - 4] = 1
        out.append(MultiLabelExample(tokens=[first, *tail], labels=labels))
    return out


def _selector(config: SelectorConfig) -> SelectorParameters:
    embedding = np.random.default_rng(8).normal(0.0, 8**-0.5, (12, 8))
    return init_selector(config, embedding, enc_layers=2, dec_layers=2, max_len=8)


def test_macro_scores_by_hand() -> None:
    probs = np.array([[0.9, 0.2, 0.1], [0.8, 0.7, 0.1], [0.1, 0.6, 0.2]])
    labels = np.array([[1, 0, 0], [0, 1, 0], [0, 1, 0]], dtype=float)
    scores = macro_scores(probs, labels, threshold=0.5, beta=1.0)
    # Class 0: P 1/2 R 1; class 1: P 1 R 1; class 2 is inactive.
    assert scores.precision == pytest.approx(0.75)
    assert scores.recall == pytest.approx(1.0)
    assert scores.f_beta == pytest.approx((2 / 3 + 1.0) / 2)


def test_macro_scores_without_active_classes() -> None:
    scores = macro_scores(np.zeros((2, 3)), np.zeros((2, 3)), threshold=0.5, beta=2.0)
    assert scores.f_beta == 1.0


def test_separable_task_is_learned() -> None:
    config = SelectorConfig(
        layers=1,
        heads=2,
        d_ff=16,
        alpha=0.0,
        beta=1.0,
        interpolation=0.5,
        learning_rate=0.3,
        epochs=20,
        batch_size=8,
        seed=4,
    )
    reports: list[EpochReport] = []
    run = train_selector(_examples(160, 1), config, _selector(config), on_epoch=reports.append)
    assert [r.epoch for r in reports] == list(range(1, 21))
    assert run.epochs[-1].scores.f_beta > 0.95
    assert run.epochs[-1].loss < run.epochs[0].loss


def test_training_is_deterministic() -> None:
    config = SelectorConfig(layers=1, heads=2, d_ff=16, epochs=2, batch_size=4, seed=6)
    data = _examples(12, 2)
    a = train_selector(data, config, _selector(config))
    b = train_selector(data, config, _selector(config))
    assert [r.loss for r in a.epochs] == [r.loss for r in b.epochs]
    np.testing.assert_array_equal(predict(data, a.params), predict(data, b.params))


def test_validation_loss_is_reported() -> None:
    config = SelectorConfig(layers=1, heads=2, d_ff=16, epochs=1, batch_size=4)
    run = train_selector(_examples(8, 3), config, _selector(config), _examples(4, 4))
    assert run.validation_loss is not None and run.validation_loss > 0


def test_label_width_must_match() -> None:
    config = SelectorConfig(layers=1, heads=2, d_ff=16, epochs=1)
    bad = [MultiLabelExample(tokens=[4], labels=[1, 0])]
    with pytest.raises(ConfigurationError):
        train_selector(bad, config, _selector(config))
    with pytest.raises(ConfigurationError):
        train_selector([], config, _selector(config))


def test_split_validation() -> None:
    data = _examples(20, 5)
    train, held = split_validation(data, seed=1)
    assert len(held) == 2 and len(train) == 18
    assert {id(ex) for ex in train}.isdisjoint(id(ex) for ex in held)
    assert split_validation(data, seed=1) == (train, held)
    assert len(split_validation(data[:2], seed=1)[1]) == 1
    with pytest.raises(ConfigurationError):
        split_validation(data[:1], seed=1)


def test_grid_covers_every_point() -> None:
    points = grid_points(SelectorConfig())
    assert len(points) == len(GRID_ALPHA) * len(GRID_BETA) * len(GRID_LAMBDA)
    assert len({(p.alpha, p.beta, p.interpolation) for p in points}) == len(points)


@pytest.mark.slow
def test_grid_search_returns_lowest_validation_loss() -> None:
    base = SelectorConfig(layers=1, heads=2, d_ff=16, epochs=2, batch_size=8)
    best, run = grid_search(_examples(24, 6), _examples(8, 7), base, _selector)
    assert best in grid_points(base)
    assert run.validation_loss is not None
