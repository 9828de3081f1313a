"""Multi-head scaled dot-product attention with key padding masks."""

from typing import Optional

import numpy as np

from mct_hfr.errors import DimensionError
from mct_hfr.tensorlab import Tensor, softmax_rows, layer_norm


def split_heads(x: Tensor, heads: int) -> Tensor:
    """Reshapes `(B, T, d)` into `(B, heads, T, d / heads)`."""
    batch, length, d = x.shape
    return x.reshape(batch, length, heads, d // heads).transpose(0, 2, 1, 3)


def merge_heads(x: Tensor) -> Tensor:
    """Inverse of `split_heads`."""
    batch, heads, length, d_k = x.shape
    return x.transpose(0, 2, 1, 3).reshape(batch, length, heads * d_k)


def attend(
    q: Tensor,
    k: Tensor,
    v: Tensor,
    key_valid: np.ndarray,
    heads: int,
) -> tuple[Tensor, Tensor]:
    """
    Computes `softmax(Q K^T / sqrt(d_k)) V` per head on projected
    inputs and returns the merged output and attention probabilities.

    Keyword arguments:
    q -- projected queries `(B, T_q, d)`
    k -- projected keys `(B, T_k, d)`
    v -- projected values `(B, T_k, d)`
    key_valid -- boolean `(B, T_k)`; invalid keys get zero weight
    heads -- number of heads
    """
    if (
        k.shape != v.shape
        or q.shape[0] != k.shape[0]
        or q.shape[2] != k.shape[2]
    ):
        raise DimensionError("attend", q.shape, k.shape, v.shape)
    if q.shape[2] % heads != 0:
        raise DimensionError(
            "attend", q.shape, detail=f"width not divisible by {heads} heads"
        )
    d_k = q.shape[2] // heads
    scores = split_heads(q, heads) @ split_heads(k, heads).swapaxes(-1, -2)
    probs = softmax_rows(
        scores * (1.0 / np.sqrt(d_k)), key_valid[:, None, None, :]
    )
    return merge_heads(probs @ split_heads(v, heads)), probs


def attention_block(
    x: Tensor,
    source: Tensor,
    key_valid: np.ndarray,
    params,
    prefix: str,
    heads: int,
    eps: float,
    key_scale: Optional[np.ndarray] = None,
) -> tuple[Tensor, Tensor]:
    """
    Attention unit with residual connection and layer normalization:
    `LN(attend(x W_Q, s W_K, s W_V) W_O + x)`. With `source = x` this is
    a self-attention unit, otherwise a cross-attention unit whose
    source reinforces the target `x`.

    Keyword arguments:
    x -- target sequence `(B, T_q, d)`
    source -- source sequence `(B, T_k, d)`
    key_valid -- boolean `(B, T_k)`
    params -- parameter mapping containing `<prefix>.{wq,wk,wv,wo}` and
              `<prefix>.ln.{gain,bias}`
    prefix -- parameter name prefix
    heads -- number of heads
    eps -- layer normalization epsilon
    key_scale -- optional per-key factor `(B, T_k)` applied to keys
                 (default None)
    """
    keys = source @ params[f"{prefix}.wk"]
    if key_scale is not None:
        keys = keys * key_scale[..., None]
    out, probs = attend(
        x @ params[f"{prefix}.wq"],
        keys,
        source @ params[f"{prefix}.wv"],
        key_valid,
        heads,
    )
    return (
        layer_norm(
            out @ params[f"{prefix}.wo"] + x,
            params[f"{prefix}.ln.gain"],
            params[f"{prefix}.ln.bias"],
            eps,
        ),
        probs,
    )
