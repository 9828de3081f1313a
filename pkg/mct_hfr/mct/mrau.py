"""
Multimodal re-scaled attention: every modality is reinforced from the
temporal concatenation of all modalities' (re-scaled) keys and values.
"""

from typing import Sequence

import numpy as np

from mct_hfr.errors import DimensionError
from mct_hfr.util import MODALITIES
from mct_hfr.tensorlab import Tensor, concat, layer_norm
from .attention import attend
from .config import ModelConfig


def rescale_factors(
    true_lens: Sequence[int] | np.ndarray, max_lens: Sequence[int]
) -> tuple[np.ndarray, np.ndarray]:
    """
    Returns the balance factors `1/sqrt(T_m)` (last axis indexes
    modalities) and the shared extrapolation factor
    `ln(max(sum T_m, 2)) / ln(sum T_m^max)`.

    Works on a single `(T_a, T_v, T_l)` or per-sample `(B, 3)` lengths.
    """
    lens = np.asarray(true_lens, dtype=np.float64)
    if lens.shape[-1] != len(max_lens):
        raise DimensionError("rescale_factors", lens.shape, (len(max_lens),))
    if (lens < 1).any():
        raise ValueError(
            "All modalities need at least one step (got lengths "
            + f"{lens.tolist()})."
        )
    total_max = float(np.sum(max_lens))
    if total_max < 2:
        raise ValueError("Maximum lengths must sum to at least 2.")
    gamma_b = 1.0 / np.sqrt(lens)
    gamma_e = np.log(np.maximum(lens.sum(axis=-1), 2.0)) / np.log(total_max)
    return gamma_b, gamma_e


def key_scales(
    lengths: Sequence[np.ndarray], cfg: ModelConfig
) -> np.ndarray:
    """
    Returns per-sample, per-modality key factors `(B, M)` according to
    the enabled re-scaling switches.
    """
    gamma_b, gamma_e = rescale_factors(
        np.stack(lengths, axis=-1), cfg.max_lengths
    )
    if not cfg.use_gamma_b:
        gamma_b = np.ones_like(gamma_b)
    if not cfg.use_gamma_e:
        gamma_e = np.ones_like(gamma_e)
    return gamma_b * gamma_e[:, None]


def mrau_forward(
    hs: Sequence[Tensor],
    lengths: Sequence[np.ndarray],
    valid: Sequence[np.ndarray],
    params,
    layer: int,
    cfg: ModelConfig,
) -> tuple[list[Tensor], list[Tensor]]:
    """
    Applies re-scaled attention layer `layer` and returns the
    reinforced features (same shapes as `hs`) together with every
    modality's attention probabilities `(B, heads, T_m, sum T)`.

    Keyword arguments:
    hs -- per-modality inputs `(B, T_m, d)`
    lengths -- per-modality true lengths `(B,)`
    valid -- per-modality boolean `(B, T_m)`
    params -- parameter mapping
    layer -- layer index
    cfg -- model configuration
    """
    if len(hs) != len(MODALITIES) or any(
        h.ndim != 3 or h.shape[-1] != cfg.d or h.shape[:2] != v.shape
        for h, v in zip(hs, valid)
    ):
        raise DimensionError("mrau_forward", *(h.shape for h in hs))
    scales = key_scales(lengths, cfg)
    prefixes = [f"mrau.{layer}.{m}" for m in MODALITIES]
    queries, keys, values = [], [], []
    for m, (h, prefix) in enumerate(zip(hs, prefixes)):
        queries.append(h @ params[f"{prefix}.wq"])
        keys.append((h @ params[f"{prefix}.wk"]) * scales[:, m, None, None])
        values.append(h @ params[f"{prefix}.wv"])
    keys_c = concat(keys, axis=1)
    values_c = concat(values, axis=1)
    valid_c = np.concatenate(valid, axis=1)

    outputs, attention = [], []
    for h, q, mask, prefix in zip(hs, queries, valid, prefixes):
        out, probs = attend(q, keys_c, values_c, valid_c, cfg.heads)
        h1 = layer_norm(
            out @ params[f"{prefix}.wo"] + h,
            params[f"{prefix}.ln1.gain"],
            params[f"{prefix}.ln1.bias"],
            cfg.ln_eps,
        )
        hidden = (
            h1 @ params[f"{prefix}.ffn1.weight"]
            + params[f"{prefix}.ffn1.bias"]
        ).relu()
        ffn = (
            hidden @ params[f"{prefix}.ffn2.weight"]
            + params[f"{prefix}.ffn2.bias"]
        )
        e = layer_norm(
            ffn + h1,
            params[f"{prefix}.ln2.gain"],
            params[f"{prefix}.ln2.bias"],
            cfg.ln_eps,
        )
        outputs.append(e * mask[..., None].astype(e.dtype))
        attention.append(probs)
    return outputs, attention
