"""Central finite-difference checks of analytic gradients."""

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from tiedmulti.engine.tensor import Tensor, backward, no_grad
from tiedmulti.utils.exceptions import ShapeError


@dataclass
class GradCheckResult:
    """Worst relative error seen over the checked elements."""

    max_rel_error: float = 0.0
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def relative_error(analytic: float, numeric: float, floor: float = 1e-8) -> float:
    """|a - n| / max(|a|, |n|); both below `floor` counts as agreement."""
    scale = max(abs(analytic), abs(numeric))
    if scale < floor:
        return 0.0
    return abs(analytic - numeric) / scale


def gradcheck(
    fn: Callable[[], Tensor],
    inputs: Sequence[Tensor],
    *,
    h: float = 1e-5,
    rtol: float = 1e-4,
    max_elements: int | None = None,
    seed: int = 0,
    names: Sequence[str] | None = None,
) -> GradCheckResult:
    """Compare backward() against central differences of a scalar function.

    `fn` re-runs the forward pass reading the current values of `inputs`; the
    inputs are perturbed in place and restored. With `max_elements` each input
    is checked at a random subset of its elements instead of exhaustively.
    """
    for t in inputs:
        t.grad = None
    loss = fn()
    if loss.ndim != 0:
        raise ShapeError(f"gradcheck needs a scalar function, got shape {loss.shape}")
    backward(loss)
    analytic = [np.zeros_like(t.data) if t.grad is None else t.grad.copy() for t in inputs]

    rng = np.random.default_rng(seed)
    result = GradCheckResult()
    for pos, t in enumerate(inputs):
        label = names[pos] if names else f"input{pos}"
        flat = t.data.reshape(-1)
        picked = np.arange(flat.size)
        if max_elements is not None and flat.size > max_elements:
            picked = np.sort(rng.choice(flat.size, size=max_elements, replace=False))
        for k in picked:
            original = flat[k]
            with no_grad():
                flat[k] = original + h
                up = fn().item()
                flat[k] = original - h
                down = fn().item()
            flat[k] = original
            numeric = (up - down) / (2.0 * h)
            err = relative_error(float(analytic[pos].reshape(-1)[k]), numeric)
            result.checked += 1
            result.max_rel_error = max(result.max_rel_error, err)
            if err >= rtol:
                result.failures.append(f"{label}[{int(k)}]: rel err {err:.2e}")
    return result
