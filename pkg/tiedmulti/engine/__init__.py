"""Reverse-mode autodiff over NumPy arrays."""

from tiedmulti.engine.tensor import GradTape, Tensor, backward, no_grad

__all__ = ["GradTape", "Tensor", "backward", "no_grad"]
