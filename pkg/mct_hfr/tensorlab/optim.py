"""AdamW with decoupled weight decay."""

from typing import Mapping, Optional
from dataclasses import dataclass, field

import numpy as np

from mct_hfr.errors import DimensionError, NonFiniteError
from .tensor import Tensor


@dataclass
class OptimState:
    """
    Optimizer state for `adamw_step`.

    Keyword arguments:
    lr -- learning rate
          (default 1e-4)
    beta1 -- decay rate of the first moment
             (default 0.9)
    beta2 -- decay rate of the second moment
             (default 0.999)
    eps -- denominator guard
           (default 1e-8)
    weight_decay -- decoupled weight decay coefficient
                    (default 0.01)
    first_moment -- per-parameter first moment estimates
                    (default empty; allocated lazily as zeros)
    second_moment -- per-parameter second moment estimates
                     (default empty; allocated lazily as zeros)
    step_count -- number of steps taken
                  (default 0)
    """

    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01
    first_moment: dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: dict[str, np.ndarray] = field(default_factory=dict)
    step_count: int = 0

    def __post_init__(self):
        if self.lr < 0 or self.eps < 0 or self.weight_decay < 0:
            raise ValueError(
                "Optimizer settings 'lr', 'eps' and 'weight_decay' must be "
                + "non-negative."
            )
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("Optimizer betas must be in [0, 1).")


def adamw_step(
    params: Mapping[str, Tensor],
    grads: Optional[Mapping[str, np.ndarray]],
    state: OptimState,
) -> OptimState:
    """
    Performs one AdamW update of `params` in place and returns the
    (updated) `state`.

    Every parameter is first decayed as `p <- p * (1 - lr * wd)` and
    then moved by the bias-corrected Adam step. All gradients are
    validated before any parameter is touched.

    Keyword arguments:
    params -- named parameter tensors
    grads -- named gradients; if `None`, the tensors' `grad`-buffers
             are used (missing buffers count as zero)
    state -- optimizer state
    """
    _grads = {}
    for name, param in params.items():
        if grads is None:
            grad = param.grad
        else:
            grad = grads.get(name)
        if grad is None:
            grad = np.zeros_like(param.values)
        if grad.shape != param.shape:
            raise DimensionError(
                "adamw_step", param.shape, grad.shape, detail=name
            )
        if not np.isfinite(grad).all():
            raise NonFiniteError(
                f"Non-finite gradient for parameter '{name}'."
            )
        _grads[name] = grad

    state.step_count += 1
    t = state.step_count
    correction1 = 1 - state.beta1**t
    correction2 = 1 - state.beta2**t
    decay = 1 - state.lr * state.weight_decay
    for name, param in params.items():
        grad = _grads[name]
        m = state.first_moment.get(name)
        v = state.second_moment.get(name)
        if m is None:
            m = np.zeros_like(param.values)
            v = np.zeros_like(param.values)
        m = state.beta1 * m + (1 - state.beta1) * grad
        v = state.beta2 * v + (1 - state.beta2) * grad * grad
        state.first_moment[name] = m
        state.second_moment[name] = v
        param.values *= decay
        step = (
            state.lr
            * (m / correction1)
            / (np.sqrt(v / correction2) + state.eps)
        )
        param.values -= step.astype(param.dtype, copy=False)
    return state


class AdamW:
    """
    Thin stateful wrapper around `adamw_step` for a fixed set of named
    parameters.

    Keyword arguments:
    params -- named parameter tensors
    lr -- learning rate
          (default 1e-4)
    weight_decay -- decoupled weight decay coefficient
                    (default 0.01)
    """

    def __init__(
        self,
        params: Mapping[str, Tensor],
        lr: float = 1e-4,
        weight_decay: float = 0.01,
        **kwargs,
    ) -> None:
        self.params = dict(params)
        self.state = OptimState(lr=lr, weight_decay=weight_decay, **kwargs)

    def step(self) -> None:
        """Update parameters from their gradient buffers."""
        adamw_step(self.params, None, self.state)

    def zero_grad(self) -> None:
        """Reset all gradient buffers."""
        for param in self.params.values():
            param.zero_grad()
