"""Gradient and edge-case tests for the differentiable building blocks."""

from collections.abc import Callable

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tiedmulti.engine import functional as F
from tiedmulti.engine.gradcheck import gradcheck, relative_error
from tiedmulti.engine.tensor import Tensor
from tiedmulti.utils.exceptions import NumericalError, ShapeError, VocabularyError


def test_softmax_rows_sum_to_one_and_survive_large_logits() -> None:
    t = Tensor(np.array([[1000.0, 1000.0, 999.0], [0.0, -5.0, 5.0]]))
    probs = F.softmax_rows(t).data
    assert_allclose(probs.sum(axis=-1), [1.0, 1.0])
    assert np.all(np.isfinite(probs))


def test_softmax_rejects_non_finite_rows() -> None:
    t = Tensor(np.array([[0.0, 1.0], [np.nan, 0.0]]))
    with pytest.raises(NumericalError, match="row 1"):
        F.softmax_rows(t)


def test_softmax_rejects_empty_rows() -> None:
    with pytest.raises(ShapeError):
        F.softmax_rows(Tensor(np.zeros((2, 0))))


@pytest.mark.parametrize("op", [F.softmax_rows, F.log_softmax])
def test_softmax_family_gradcheck(
    op: Callable[[Tensor], Tensor], rng: np.random.Generator
) -> None:
    x = Tensor(rng.normal(size=(3, 5)), requires_grad=True)
    weights = rng.normal(size=(3, 5))
    result = gradcheck(lambda: (op(x) * weights).sum(), [x])
    assert result.ok, result.failures


def test_cross_entropy_gradcheck_with_smoothing_and_padding(rng: np.random.Generator) -> None:
    logits = Tensor(rng.normal(size=(2, 4, 6)), requires_grad=True)
    targets = np.array([[3, 5, 2, 0], [4, 1, 0, 0]])
    result = gradcheck(lambda: F.cross_entropy(logits, targets, label_smoothing=0.1), [logits])
    assert result.ok, result.failures


def test_cross_entropy_matches_direct_formula(rng: np.random.Generator) -> None:
    logits = rng.normal(size=(3, 5))
    targets = np.array([1, 4, 0])
    eps = 0.2
    logp = logits - np.log(np.exp(logits).sum(axis=-1, keepdims=True))
    q = np.full((3, 5), eps / 5)
    q[np.arange(3), targets] += 1.0 - eps
    expected = -(q * logp).sum(axis=-1).mean()
    value = F.cross_entropy(Tensor(logits), targets, label_smoothing=eps, pad_id=None).item()
    assert value == pytest.approx(expected, rel=1e-12)


def test_cross_entropy_ignores_padding_positions(rng: np.random.Generator) -> None:
    logits = rng.normal(size=(1, 3, 4))
    full = F.cross_entropy(Tensor(logits[:, :2]), np.array([[2, 3]])).item()
    padded = F.cross_entropy(Tensor(logits), np.array([[2, 3, 0]])).item()
    assert padded == pytest.approx(full, rel=1e-12)


def test_cross_entropy_errors() -> None:
    logits = Tensor(np.zeros((2, 4)))
    with pytest.raises(VocabularyError):
        F.cross_entropy(logits, np.array([1, 4]))
    with pytest.raises(ShapeError):
        F.cross_entropy(logits, np.array([0, 0]))
    with pytest.raises(ShapeError):
        F.cross_entropy(logits, np.array([1, 2, 3]))


def test_layer_norm_gradcheck(rng: np.random.Generator) -> None:
    x = Tensor(rng.normal(size=(2, 3, 6)), requires_grad=True)
    gain = Tensor(rng.normal(size=6), requires_grad=True)
    bias = Tensor(rng.normal(size=6), requires_grad=True)
    weights = rng.normal(size=(2, 3, 6))
    result = gradcheck(lambda: (F.layer_norm(x, gain, bias) * weights).sum(), [x, gain, bias])
    assert result.ok, result.failures


def test_linear_relu_sigmoid_gradcheck(rng: np.random.Generator) -> None:
    x = Tensor(rng.normal(size=(4, 3)), requires_grad=True)
    w = Tensor(rng.normal(size=(3, 5)), requires_grad=True)
    b = Tensor(rng.uniform(0.3, 0.6, size=5), requires_grad=True)

    def fn() -> Tensor:
        h = F.linear(x, w, b)
        return (F.sigmoid(h) + F.relu(h + 10.0) * h).sum()

    result = gradcheck(fn, [x, w, b])
    assert result.ok, result.failures


def test_embedding_rejects_out_of_range_ids() -> None:
    table = Tensor(np.zeros((4, 2)))
    with pytest.raises(VocabularyError):
        F.embedding(table, [0, 4])
    with pytest.raises(VocabularyError):
        F.embedding(table, [-1])


def test_dropout_is_identity_without_generator() -> None:
    x = Tensor(np.ones(5))
    assert F.dropout(x, 0.5, None) is x
    assert F.dropout(x, 0.0, np.random.default_rng(0)) is x


def test_masks_and_positions_shapes() -> None:
    causal = F.causal_mask(3)
    assert causal[0, 1] == F.MASK_VALUE and causal[1, 0] == 0.0
    pad = F.padding_mask(np.array([[5, 6, 0]]))
    assert pad.shape == (1, 1, 1, 3)
    assert pad[0, 0, 0, 2] == F.MASK_VALUE
    table = F.sinusoidal_positions(4, 6)
    assert table.shape == (4, 6)
    assert_allclose(table[0, 1::2], np.ones(3))


def test_relative_error_floor() -> None:
    assert relative_error(1e-12, -1e-12) == 0.0
    assert relative_error(1.0, 1.1) == pytest.approx(0.1 / 1.1)
