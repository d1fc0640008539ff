"""Tests for the combination classifier and the selection rule."""

from pathlib import Path

import numpy as np
import pytest

from tiedmulti.config.experiment import SelectorConfig
from tiedmulti.core.kinds import SpecialToken
from tiedmulti.core.models import LayerCombination
from tiedmulti.engine.gradcheck import gradcheck
from tiedmulti.model.checkpoint import save_checkpoint
from tiedmulti.model.transformer import Parameters
from tiedmulti.selector.losses import class_weights, selector_loss
from tiedmulti.selector.model import (
    SelectorParameters,
    load_selector,
    pad_with_cls,
    save_selector,
    select_combination,
    selector_for_model,
    selector_forward,
    selector_probabilities,
)
from tiedmulti.utils.exceptions import CheckpointError, VocabularyError

C = LayerCombination
SMALL = SelectorConfig(layers=1, heads=2, d_ff=16, seed=5)


@pytest.fixture
def selector(tiny_params: Parameters) -> SelectorParameters:
    return selector_for_model(SMALL, tiny_params)


def test_backoff_when_nothing_reaches_threshold() -> None:
    rng = np.random.default_rng(17)
    for _ in range(1000):
        probs = rng.uniform(0.0, 0.5, 9)
        assert select_combination(probs, 0.5, 3, 3) == C(3, 3)


def test_highest_probability_wins() -> None:
    probs = np.full(9, 0.1)
    probs[C(2, 1).index(3)] = 0.7
    probs[C(1, 3).index(3)] = 0.6
    assert select_combination(probs, 0.5, 3, 3) == C(2, 1)


def test_tied_maxima_resolve_to_fastest() -> None:
    probs = np.zeros(36)
    probs[C(6, 1).index(6)] = 0.8
    probs[C(1, 2).index(6)] = 0.8
    assert select_combination(probs, 0.5, 6, 6) == C(6, 1)


def test_wrong_number_of_probabilities() -> None:
    with pytest.raises(VocabularyError):
        select_combination([0.9, 0.1], 0.5, 3, 3)


def test_pad_with_cls_layout() -> None:
    ids, readout = pad_with_cls([[4, 5, 6], [7]], max_len=8)
    cls, pad = int(SpecialToken.CLS), int(SpecialToken.PAD)
    assert ids.tolist() == [[4, 5, 6, cls], [7, cls, pad, pad]]
    assert readout.tolist() == [3, 1]
    with pytest.raises(VocabularyError):
        pad_with_cls([[4] * 8], max_len=8)
    with pytest.raises(VocabularyError):
        pad_with_cls([[]], max_len=8)


def test_outputs_are_probabilities(selector: SelectorParameters, tiny_params: Parameters) -> None:
    probs = selector_probabilities([[4, 5], [6, 7, 8, 9]], selector)
    assert probs.shape == (2, 9)
    assert np.all((probs.data > 0) & (probs.data < 1))
    np.testing.assert_array_equal(selector.embedding.data, tiny_params.embedding.data)
    assert selector.embedding is not tiny_params.embedding


def test_padding_does_not_change_a_row(selector: SelectorParameters) -> None:
    alone = selector_forward([4, 5], selector).data
    batched = selector_probabilities([[4, 5], [6, 7, 8, 9, 10]], selector).data[0]
    np.testing.assert_allclose(alone, batched, atol=1e-12)


def test_zero_output_layer_gives_one_half(selector: SelectorParameters) -> None:
    selector.output.weight.data[...] = 0.0
    selector.output.bias.data[...] = 0.0
    np.testing.assert_array_equal(selector_forward([4, 5, 6], selector).data, np.full(9, 0.5))


def test_selector_gradients(selector: SelectorParameters) -> None:
    tokens = [[4, 5], [6, 7, 8]]
    labels = np.zeros((2, 9))
    labels[0, 2] = labels[1, 0] = labels[1, 4] = 1.0
    weights = class_weights(np.ones(9, dtype=int), alpha=1.0)
    named = list(selector.named_parameters())
    result = gradcheck(
        lambda: selector_loss(selector_probabilities(tokens, selector), labels, SMALL, weights),
        [t for _, t in named],
        max_elements=4,
        names=[n for n, _ in named],
    )
    assert result.ok, result.failures


def test_save_and_load(selector: SelectorParameters, tmp_path: Path) -> None:
    path = save_selector(selector, tmp_path / "selector.ckpt")
    loaded = load_selector(path, SelectorConfig(threshold=0.3))
    assert loaded.classes == 9
    assert loaded.config.layers == SMALL.layers
    assert loaded.config.threshold == 0.3
    np.testing.assert_allclose(
        selector_forward([4, 5], loaded).data, selector_forward([4, 5], selector).data, atol=1e-5
    )


def test_model_checkpoint_is_not_a_selector(tiny_params: Parameters, tmp_path: Path) -> None:
    path = save_checkpoint(tiny_params, tmp_path / "model.ckpt")
    with pytest.raises(CheckpointError):
        load_selector(path)


@pytest.mark.parametrize("partner_length", [1, 2, 4, 7])
def test_readout_ignores_padding_after_the_row(
    selector: SelectorParameters, partner_length: int
) -> None:
    alone = selector_forward([5, 9, 6], selector).data
    partner = [4 + k % 8 for k in range(partner_length)]
    batched = selector_probabilities([[5, 9, 6], partner], selector).data[0]
    np.testing.assert_allclose(batched, alone, rtol=0, atol=1e-12)
