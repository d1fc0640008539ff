"""Tests for the optimizers and the learning-rate schedule."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from tiedmulti.engine.tensor import Tensor
from tiedmulti.training.optim import Adam, NesterovSGD, global_norm, inverse_sqrt_rate


def _param(values: list[float], grad: list[float]) -> Tensor:
    p = Tensor(np.asarray(values), requires_grad=True)
    p.grad = np.asarray(grad)
    return p


def test_schedule_peaks_at_warmup() -> None:
    rates = [inverse_sqrt_rate(s, 512, 100, 2.0) for s in range(1, 300)]
    assert int(np.argmax(rates)) + 1 == 100
    assert inverse_sqrt_rate(100, 512, 100, 2.0) == pytest.approx(2.0 * 512**-0.5 * 100**-0.5)


def test_schedule_without_warmup_decays_from_first_step() -> None:
    assert inverse_sqrt_rate(1, 64, 0, 1.0) > inverse_sqrt_rate(2, 64, 0, 1.0)
    assert inverse_sqrt_rate(0, 64, 0, 1.0) == inverse_sqrt_rate(1, 64, 0, 1.0)


def test_adam_zero_rate_leaves_weights_but_moves_moments() -> None:
    p = _param([1.0, -2.0], [0.5, 0.25])
    opt = Adam([p])
    opt.step(0.0)
    assert_array_equal(p.data, [1.0, -2.0])
    assert np.any(opt.m[0])


def test_adam_first_step_is_sign_of_gradient() -> None:
    p = _param([0.0, 0.0], [3.0, -0.1])
    Adam([p]).step(0.1)
    assert_allclose(p.data, [-0.1, 0.1], rtol=1e-6)


def test_nesterov_without_momentum_is_plain_sgd() -> None:
    p = _param([1.0, 1.0], [0.5, -1.0])
    NesterovSGD([p], momentum=0.0).step(0.1)
    assert_allclose(p.data, [0.95, 1.1])


def test_nesterov_update() -> None:
    p = _param([0.0], [1.0])
    opt = NesterovSGD([p], momentum=0.9)
    opt.step(0.1)
    assert_allclose(p.data, [-0.1 * (1.0 + 0.9)])
    opt.step(0.1)
    velocity = 0.9 * 1.0 + 1.0
    assert_allclose(p.data, [-0.19 - 0.1 * (1.0 + 0.9 * velocity)])


def test_zero_grad_and_global_norm() -> None:
    p = _param([0.0, 0.0], [3.0, 4.0])
    assert global_norm([p]) == pytest.approx(5.0)
    opt = NesterovSGD([p])
    opt.zero_grad()
    assert p.grad is None
    assert global_norm([p]) == 0.0
