"""
Central finite-difference checks of analytic gradients.
"""

from typing import Callable, Mapping, Optional
from dataclasses import dataclass

import numpy as np

from .tensor import Tensor, no_grad


@dataclass
class ProbeResult:
    """
    Result of comparing analytic and numeric gradients for one
    parameter tensor.

    Keyword arguments:
    name -- parameter name
    max_rel_error -- largest relative error among the probed entries
    worst_index -- flat index of the worst entry
    probes -- number of probed entries
    """

    name: str
    max_rel_error: float
    worst_index: int
    probes: int


def relative_error(
    analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-3
) -> np.ndarray:
    """
    Returns elementwise `|a - n|` scaled by the larger of the two
    arrays' maximum magnitude (but at least `floor`).
    """
    scale = max(
        float(np.abs(analytic).max(initial=0.0)),
        float(np.abs(numeric).max(initial=0.0)),
        floor,
    )
    return np.abs(analytic - numeric) / scale


def check_gradients(
    loss_fn: Callable[[], Tensor],
    params: Mapping[str, Tensor],
    step: float = 1e-5,
    probes: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    analytic_hook: Optional[Callable[[str, np.ndarray], np.ndarray]] = None,
) -> list[ProbeResult]:
    """
    Compares gradients from `backward` against central differences
    `(f(p+h) - f(p-h)) / 2h` for every tensor in `params`.

    Keyword arguments:
    loss_fn -- callable returning a scalar loss built from `params`
    params -- named leaf tensors (modified temporarily)
    step -- finite-difference step `h`
            (default 1e-5)
    probes -- maximum number of entries probed per tensor
              (default None; probes every entry)
    rng -- generator used to choose probed entries if `probes` is set
           (default None; uses a fixed seed)
    analytic_hook -- optional transformation applied to every analytic
                     gradient before comparison (used to inject faults)
                     (default None)
    """
    for param in params.values():
        param.zero_grad()
    loss_fn().backward()
    analytic = {
        name: (
            np.zeros_like(p.values) if p.grad is None else p.grad.copy()
        )
        for name, p in params.items()
    }
    for param in params.values():
        param.zero_grad()
    if analytic_hook is not None:
        analytic = {
            name: analytic_hook(name, grad) for name, grad in analytic.items()
        }

    _rng = rng or np.random.default_rng(0)
    results = []
    for name, param in params.items():
        flat = param.values.reshape(-1)
        if probes is None or probes >= flat.size:
            indices = np.arange(flat.size)
        else:
            indices = np.sort(_rng.choice(flat.size, probes, replace=False))
        numeric = np.zeros(len(indices))
        with no_grad():
            for i, index in enumerate(indices):
                original = flat[index]
                flat[index] = original + step
                upper = loss_fn().item()
                flat[index] = original - step
                lower = loss_fn().item()
                flat[index] = original
                numeric[i] = (upper - lower) / (2 * step)
        errors = relative_error(
            analytic[name].reshape(-1)[indices], numeric
        )
        worst = int(np.argmax(errors)) if len(errors) else 0
        results.append(
            ProbeResult(
                name=name,
                max_rel_error=float(errors[worst]) if len(errors) else 0.0,
                worst_index=int(indices[worst]) if len(errors) else 0,
                probes=len(indices),
            )
        )
    return results
