"""
Distances between batches of fused vectors used by the alignment
loss.
"""

from typing import Callable

import numpy as np

from mct_hfr.errors import DimensionError
from mct_hfr.tensorlab import Tensor, norm, smooth_l1, softmax_rows


Metric = Callable[[Tensor, Tensor], Tensor]
COSINE_FLOOR = 1e-12
PROBABILITY_FLOOR = 1e-12


def _check_pair(op: str, x1: Tensor, x2: Tensor) -> None:
    if x1.ndim != 2 or x1.shape != x2.shape:
        raise DimensionError(op, x1.shape, x2.shape)


def cmd(x1: Tensor, x2: Tensor, order: int = 5) -> Tensor:
    """
    Central moment discrepancy of two `(batch, dim)` samples:
    `||E(x1) - E(x2)|| + sum_{k=2..order} ||C_k(x1) - C_k(x2)||` with
    coordinate-wise central moments `C_k` over the batch axis.

    Keyword arguments:
    x1 -- first sample
    x2 -- second sample
    order -- highest moment K
             (default 5)
    """
    _check_pair("cmd", x1, x2)
    if x1.shape[0] < 2:
        raise ValueError(
            f"Central moments need a batch of at least 2 (got {x1.shape[0]})."
        )
    if order < 1:
        raise ValueError(f"Moment order must be at least 1 (got {order}).")
    mean1 = x1.mean(axis=0)
    mean2 = x2.mean(axis=0)
    total = norm(mean1 - mean2)
    centered1 = x1 - mean1
    centered2 = x2 - mean2
    for k in range(2, order + 1):
        total = total + norm(
            (centered1**k).mean(axis=0) - (centered2**k).mean(axis=0)
        )
    return total


def cosine_distance(x1: Tensor, x2: Tensor) -> Tensor:
    """Batch mean of `1 - cos(x1[b], x2[b])`."""
    _check_pair("cosine_distance", x1, x2)
    dot = (x1 * x2).sum(axis=-1)
    scale = norm(x1).clip_min(COSINE_FLOOR) * norm(x2).clip_min(COSINE_FLOOR)
    return 1.0 - (dot / scale).mean()


def jsd(x1: Tensor, x2: Tensor) -> Tensor:
    """
    Batch mean of the base-2 Jensen-Shannon divergence between the
    row-wise softmax distributions of `x1` and `x2`.
    """
    _check_pair("jsd", x1, x2)
    p = softmax_rows(x1)
    q = softmax_rows(x2)
    m = (p + q) * 0.5
    log_m = m.clip_min(PROBABILITY_FLOOR).log()
    divergence = (p * (p.clip_min(PROBABILITY_FLOOR).log() - log_m)).sum(
        axis=-1
    ) + (q * (q.clip_min(PROBABILITY_FLOOR).log() - log_m)).sum(axis=-1)
    return (divergence * (0.5 / np.log(2.0))).mean()


def smooth_l1_distance(x1: Tensor, x2: Tensor) -> Tensor:
    """Element mean of the smooth-L1 function of `x1 - x2`."""
    _check_pair("smooth_l1_distance", x1, x2)
    return smooth_l1(x1 - x2).mean()


MOMENT_METRICS = ("cmd",)
"""Metrics that need at least two samples per batch."""

METRIC_OPTIONS = {
    "cmd": cmd,
    "cosine": cosine_distance,
    "jsd": jsd,
    "smooth_l1": smooth_l1_distance,
}


def load_metric(metric: str, cmd_order: int = 5) -> Metric:
    """
    If valid, returns the distance function registered as `metric`.
    """
    if metric not in METRIC_OPTIONS:
        raise ValueError(
            f"Metric '{metric}' is not allowed. Possible values are: "
            + f"{', '.join(METRIC_OPTIONS.keys())}."
        )
    if metric == "cmd":
        return lambda x1, x2: cmd(x1, x2, cmd_order)
    return METRIC_OPTIONS[metric]
