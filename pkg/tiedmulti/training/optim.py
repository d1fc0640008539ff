"""Optimizers and the learning-rate schedule."""

import math
from collections.abc import Sequence

import numpy as np

from tiedmulti.engine.tensor import Array, Tensor


def inverse_sqrt_rate(step: int, d_model: int, warmup_steps: int, factor: float) -> float:
    """Linear warmup followed by inverse-square-root decay (1-based `step`)."""
    step = max(step, 1)
    decay = step**-0.5
    if warmup_steps > 0:
        decay = min(decay, step * warmup_steps**-1.5)
    return factor * d_model**-0.5 * decay


class Adam:
    """Adam with bias correction; betas (0.9, 0.98) and eps 1e-9 as in Transformer-base."""

    def __init__(
        self,
        parameters: Sequence[Tensor],
        beta1: float = 0.9,
        beta2: float = 0.98,
        eps: float = 1e-9,
    ) -> None:
        self.parameters = list(parameters)
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: list[Array] = [np.zeros_like(p.data) for p in self.parameters]
        self.v: list[Array] = [np.zeros_like(p.data) for p in self.parameters]

    def step(self, lr: float) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, m, v in zip(self.parameters, self.m, self.v, strict=True):
            if p.grad is None:
                continue
            g = p.grad
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            if lr == 0.0:
                continue
            p.data = p.data - lr * (m / c1) / (np.sqrt(v / c2) + self.eps)

    def zero_grad(self) -> None:
        for p in self.parameters:
            p.grad = None


class NesterovSGD:
    """Mini-batch SGD with Nesterov momentum: v = mu*v + g; p -= lr * (g + mu*v)."""

    def __init__(self, parameters: Sequence[Tensor], momentum: float = 0.9) -> None:
        self.parameters = list(parameters)
        self.momentum = momentum
        self.velocity: list[Array] = [np.zeros_like(p.data) for p in self.parameters]

    def step(self, lr: float) -> None:
        for p, v in zip(self.parameters, self.velocity, strict=True):
            if p.grad is None:
                continue
            v *= self.momentum
            v += p.grad
            if lr == 0.0:
                continue
            update = p.grad + self.momentum * v if self.momentum else p.grad
            p.data = p.data - lr * update

    def zero_grad(self) -> None:
        for p in self.parameters:
            p.grad = None


def global_norm(parameters: Sequence[Tensor]) -> float:
    total = sum(float(np.sum(p.grad * p.grad)) for p in parameters if p.grad is not None)
    return math.sqrt(total)
