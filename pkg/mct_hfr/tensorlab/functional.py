"""
Fused differentiable operations with hand-written backward passes
(softmax, layer normalization, temporal convolution, losses).
"""

from typing import Optional

import numpy as np

from mct_hfr.errors import DegenerateRowError, DimensionError
from .tensor import Tensor


def softmax_rows(x: Tensor, valid: Optional[np.ndarray] = None) -> Tensor:
    """
    Softmax over the last axis with per-row max-subtraction.

    Entries that are `-inf` in `x` or `False` in `valid` (broadcastable
    boolean key mask) receive exactly zero probability.

    Keyword arguments:
    x -- logits
    valid -- optional key-validity mask
             (default None; all entries valid)
    """
    logits = x.values
    if valid is not None:
        logits = np.where(valid, logits, -np.inf)
    finite_row = np.isfinite(logits).any(axis=-1)
    if not finite_row.all():
        raise DegenerateRowError(
            f"Softmax got {int((~finite_row).sum())} row(s) without any "
            + "finite logit."
        )
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    probs = exp / exp.sum(axis=-1, keepdims=True)

    def backward(g):
        return (probs * (g - (g * probs).sum(axis=-1, keepdims=True)),)

    return Tensor._make(probs, (x,), backward, "softmax_rows")


def layer_norm(
    x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-5
) -> Tensor:
    """
    Normalizes `x` over its last axis to zero mean and unit variance
    (`eps` inside the square root), followed by an affine map.
    """
    d = x.shape[-1]
    if gain.shape != (d,) or bias.shape != (d,):
        raise DimensionError("layer_norm", x.shape, gain.shape, bias.shape)
    mean = x.values.mean(axis=-1, keepdims=True)
    centered = x.values - mean
    inv_std = 1.0 / np.sqrt((centered**2).mean(axis=-1, keepdims=True) + eps)
    normed = centered * inv_std
    lead = tuple(range(x.ndim - 1))

    def backward(g):
        g_normed = g * gain.values
        g_x = inv_std * (
            g_normed
            - g_normed.mean(axis=-1, keepdims=True)
            - normed * (g_normed * normed).mean(axis=-1, keepdims=True)
        )
        return (
            g_x,
            (g * normed).sum(axis=lead),
            g.sum(axis=lead),
        )

    return Tensor._make(
        normed * gain.values + bias.values,
        (x, gain, bias),
        backward,
        "layer_norm",
    )


def conv1d_temporal(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """
    Cross-correlation over the time axis (second to last) with zero
    "same"-padding of `(k-1)/2` on both sides.

    Keyword arguments:
    x -- input of shape `(..., T, d_in)`
    weight -- kernel of shape `(k, d_in, d_out)` with odd `k`
    bias -- bias of shape `(d_out,)`
    """
    k, d_in, d_out = weight.shape
    if k % 2 == 0:
        raise ValueError(f"Temporal kernel size must be odd (got {k}).")
    if x.ndim < 2 or x.shape[-1] != d_in or bias.shape != (d_out,):
        raise DimensionError(
            "conv1d_temporal", x.shape, weight.shape, bias.shape
        )
    pad = (k - 1) // 2
    T = x.shape[-2]
    widths = [(0, 0)] * (x.ndim - 2) + [(pad, pad), (0, 0)]
    xpad = np.pad(x.values, widths)
    w = weight.values
    out = bias.values + sum(
        xpad[..., j : j + T, :] @ w[j] for j in range(k)
    )
    lead = tuple(range(x.ndim - 1))

    def backward(g):
        g_xpad = np.zeros_like(xpad)
        g_w = np.zeros_like(w)
        for j in range(k):
            g_xpad[..., j : j + T, :] += g @ w[j].T
            g_w[j] = np.tensordot(
                xpad[..., j : j + T, :], g, axes=(lead, lead)
            )
        return (
            g_xpad[..., pad : pad + T, :],
            g_w,
            g.sum(axis=lead),
        )

    return Tensor._make(
        np.asarray(out, dtype=x.dtype),
        (x, weight, bias),
        backward,
        "conv1d_temporal",
    )


def smooth_l1(x: Tensor) -> Tensor:
    """Elementwise `0.5 x^2` for `|x| < 1`, else `|x| - 0.5`."""
    a = x.values
    small = np.abs(a) < 1
    return Tensor._make(
        np.where(small, 0.5 * a * a, np.abs(a) - 0.5),
        (x,),
        lambda g: (g * np.where(small, a, np.sign(a)),),
        "smooth_l1",
    )


def norm(x: Tensor, axis: int = -1, keepdims: bool = False) -> Tensor:
    """
    Euclidean norm over `axis`; the (sub-)gradient at zero is zero.
    """
    a = x.values
    n = np.sqrt((a * a).sum(axis=axis, keepdims=True))
    safe = np.where(n > 0, n, 1.0)

    def backward(g):
        if not keepdims:
            g = np.expand_dims(g, axis)
        return (np.where(n > 0, a * g / safe, 0.0),)

    return Tensor._make(
        n if keepdims else n.squeeze(axis=axis), (x,), backward, "norm"
    )


def neg_log_pick(probs: Tensor, labels: np.ndarray, floor: float) -> Tensor:
    """
    Returns `-log(max(p, floor))` of the entries of `probs` (shape
    `(B, C)`) selected by `labels`.
    """
    picked = probs[np.arange(probs.shape[0]), np.asarray(labels)]
    return -picked.clip_min(floor).log()
