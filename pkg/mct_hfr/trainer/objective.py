"""Composite objective and curriculum of the dynamic strategy."""

from typing import Optional, TypeVar

import numpy as np


T = TypeVar("T")


def total_loss(
    ce: T, gfa: Optional[T], lfi: Optional[T], alpha: float, beta: float
) -> T:
    """
    Returns `ce + alpha * gfa + beta * lfi`; disabled components
    (`None`) contribute zero. Works on floats and tensors.
    """
    total = ce
    if gfa is not None:
        total = total + gfa * alpha
    if lfi is not None:
        total = total + lfi * beta
    return total


def ramp_proportion(epoch: int, ramp_epochs: int = 5) -> float:
    """
    Returns the fraction of ablated samples per batch in the 1-based
    `epoch`: rises linearly from 0 in the first epoch to 1 in epoch
    `ramp_epochs` and stays there.
    """
    if epoch < 1:
        raise ValueError(f"Epochs are counted from 1 (got {epoch}).")
    if ramp_epochs <= 1:
        return 1.0
    return min(1.0, (epoch - 1) / (ramp_epochs - 1))


def incomplete_rows(batch_size: int, fraction: float) -> np.ndarray:
    """
    Returns boolean flags selecting the first `floor(fraction * B)`
    samples of an (already shuffled) batch.
    """
    count = int(np.floor(fraction * batch_size + 1e-9))
    return np.arange(batch_size) < count
