"""Reconstruction and alignment losses."""

from typing import Sequence

import numpy as np

from mct_hfr.errors import DimensionError
from mct_hfr.tensorlab import Tensor, smooth_l1
from mct_hfr.mct import ce_loss
from .metrics import Metric


def lfi_loss(
    targets: Sequence[np.ndarray],
    decoded: Sequence[Tensor],
    masks: Sequence[np.ndarray],
) -> Tensor:
    """
    Smooth-L1 reconstruction error restricted to ablated steps.

    The elementwise errors of all modalities are summed and divided by
    the total number of ablated scalar entries (at least one), so the
    result is exactly zero if nothing was ablated.

    Keyword arguments:
    targets -- per-modality complete values `(B, T_m, d_m)`
    decoded -- per-modality imagined sequences `(B, T_m, d_m)`
    masks -- per-modality ablation indicators `(B, T_m)`
    """
    if not len(targets) == len(decoded) == len(masks):
        raise ValueError(
            f"Got {len(targets)} targets, {len(decoded)} reconstructions "
            + f"and {len(masks)} masks."
        )
    total = None
    count = 0
    for target, d, mask in zip(targets, decoded, masks):
        if target.shape != d.shape or mask.shape != target.shape[:2]:
            raise DimensionError("lfi_loss", target.shape, d.shape, mask.shape)
        weight = np.asarray(mask, dtype=d.dtype)[..., None]
        term = smooth_l1((d - target.astype(d.dtype)) * weight).sum()
        total = term if total is None else total + term
        count += int(np.asarray(mask, dtype=bool).sum()) * target.shape[2]
    return total * (1.0 / max(count, 1))


def gfa_loss(
    h: Tensor,
    h_complete: Tensor,
    probs_complete: Tensor,
    labels: np.ndarray,
    params,
    metric: Metric,
) -> tuple[Tensor, Tensor]:
    """
    Global alignment loss `CE(labels, probs_complete) +
    metric(h W_p + b_p, h_complete)`.

    Returns the total and the distance term.

    Keyword arguments:
    h -- fused vectors of the masked view `(B, 3d)`
    h_complete -- fused vectors of the complete view `(B, 3d)`
    probs_complete -- class probabilities of the complete view `(B, C)`
    labels -- class labels `(B,)`
    params -- parameter mapping containing `gfa.align.{weight,bias}`
    metric -- distance function
    """
    if h.shape != h_complete.shape:
        raise DimensionError("gfa_loss", h.shape, h_complete.shape)
    aligned = h @ params["gfa.align.weight"] + params["gfa.align.bias"]
    distance = metric(aligned, h_complete)
    return ce_loss(probs_complete, labels) + distance, distance
