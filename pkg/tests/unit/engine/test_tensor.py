"""Tests for the reverse-mode tensor core."""

import threading

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tiedmulti.core.kinds import Precision
from tiedmulti.engine.gradcheck import gradcheck
from tiedmulti.engine.tensor import (
    Tensor,
    backward,
    concat,
    default_dtype,
    exp,
    grad_enabled,
    log,
    no_grad,
    set_precision,
    take,
)
from tiedmulti.utils.exceptions import ShapeError


def test_broadcast_add_sums_gradient_over_broadcast_axes() -> None:
    a = Tensor(np.ones((3, 4)), requires_grad=True)
    b = Tensor(np.ones(4), requires_grad=True)
    backward((a + b).sum())
    assert a.grad is not None and b.grad is not None
    assert_allclose(a.grad, np.ones((3, 4)))
    assert_allclose(b.grad, np.full(4, 3.0))


def test_shared_node_accumulates_both_paths() -> None:
    x = Tensor(np.array([2.0, -1.0]), requires_grad=True)
    y = x * x + x
    tape = backward(y.sum())
    assert x.grad is not None
    assert_allclose(x.grad, 2 * x.data + 1)
    assert tape.visits == len(tape.nodes)


def test_backward_rejects_non_scalar() -> None:
    x = Tensor(np.ones(3), requires_grad=True)
    with pytest.raises(ShapeError):
        backward(x * 2.0)


def test_no_grad_stops_recording() -> None:
    x = Tensor(np.ones(2), requires_grad=True)
    with no_grad():
        y = x * 3.0
        assert not grad_enabled()
    assert grad_enabled()
    assert not y.requires_grad
    assert y.is_leaf


def test_no_grad_is_per_thread() -> None:
    seen: list[bool] = []
    with no_grad():
        worker = threading.Thread(target=lambda: seen.append(grad_enabled()))
        worker.start()
        worker.join()
    assert seen == [True]


def test_precision_switch_changes_new_leaves() -> None:
    set_precision(Precision.FLOAT32)
    assert default_dtype() is np.float32
    assert Tensor([1.0, 2.0]).dtype == np.float32
    set_precision(Precision.FLOAT64)
    assert Tensor([1.0]).dtype == np.float64


def test_matmul_batched_gradcheck(rng: np.random.Generator) -> None:
    a = Tensor(rng.normal(size=(2, 3, 4)), requires_grad=True)
    b = Tensor(rng.normal(size=(4, 5)), requires_grad=True)
    result = gradcheck(lambda: ((a @ b) * (a @ b)).sum(), [a, b])
    assert result.ok, result.failures


def test_elementwise_ops_gradcheck(rng: np.random.Generator) -> None:
    a = Tensor(rng.uniform(0.5, 2.0, size=(3, 2)), requires_grad=True)
    b = Tensor(rng.uniform(0.5, 2.0, size=(3, 2)), requires_grad=True)

    def fn() -> Tensor:
        return (log(a) * exp(b) / (a + b) - b / a).mean()

    result = gradcheck(fn, [a, b])
    assert result.ok, result.failures


def test_take_and_concat_gradcheck(rng: np.random.Generator) -> None:
    table = Tensor(rng.normal(size=(5, 3)), requires_grad=True)
    other = Tensor(rng.normal(size=(2, 3)), requires_grad=True)
    index = np.array([0, 3, 3, 1])

    def fn() -> Tensor:
        joined = concat([take(table, index), other], axis=0)
        return (joined * joined).sum()

    result = gradcheck(fn, [table, other])
    assert result.ok, result.failures


def test_repeated_take_accumulates_rows() -> None:
    table = Tensor(np.zeros((3, 2)), requires_grad=True)
    backward(take(table, np.array([1, 1, 2])).sum())
    assert table.grad is not None
    assert_allclose(table.grad, [[0, 0], [2, 2], [1, 1]])


def test_reshape_swapaxes_mean_gradcheck(rng: np.random.Generator) -> None:
    x = Tensor(rng.normal(size=(2, 3, 4)), requires_grad=True)

    def fn() -> Tensor:
        y = x.reshape(3, 8).swapaxes(0, 1)
        return (y * y).mean(axis=0).sum()

    result = gradcheck(fn, [x])
    assert result.ok, result.failures
