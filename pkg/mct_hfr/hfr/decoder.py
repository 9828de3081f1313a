"""Local feature imagination decoders."""

import numpy as np

from mct_hfr.errors import DimensionError
from mct_hfr.util import MODALITIES
from mct_hfr.tensorlab import Tensor
from mct_hfr.mct import ModelConfig, attention_block


def lfi_decode(
    e: Tensor,
    x: Tensor,
    valid: np.ndarray,
    params,
    modality: str,
    cfg: ModelConfig,
) -> tuple[Tensor, list[Tensor]]:
    """
    Regenerates the complete sequence of `modality` from its masked
    input and the reinforced features of the same modality.

    The masked input is projected to width d, passed through
    `decoder_blocks` pairs of a self-attention unit and a cross-attention
    unit (source `e`, target the self-attention output) and projected
    back to the input width. Padded steps of the result are zero.

    Returns the imagined sequence `(B, T, d_m)` and the cross-attention
    probabilities of every block.

    Keyword arguments:
    e -- final-layer features of the modality `(B, T, d)`
    x -- masked input of the modality `(B, T, d_m)`
    valid -- boolean `(B, T)` of non-padding steps
    params -- parameter mapping
    modality -- modality identifier
    cfg -- model configuration
    """
    m = MODALITIES.index(modality)
    if (
        x.ndim != 3
        or e.ndim != 3
        or x.shape[:2] != e.shape[:2]
        or x.shape[:2] != valid.shape
        or x.shape[2] != cfg.dims[m]
        or e.shape[2] != cfg.d
    ):
        raise DimensionError(f"lfi_decode[{modality}]", e.shape, x.shape)
    prefix = f"lfi.{modality}"
    z = (
        x @ params[f"{prefix}.proj_in.weight"]
        + params[f"{prefix}.proj_in.bias"]
    )
    cross = []
    for k in range(cfg.decoder_blocks):
        block = f"{prefix}.block.{k}"
        z, _ = attention_block(
            z, z, valid, params, f"{block}.sau", cfg.heads, cfg.ln_eps
        )
        z, probs = attention_block(
            z, e, valid, params, f"{block}.cau", cfg.heads, cfg.ln_eps
        )
        cross.append(probs)
    d = (
        z @ params[f"{prefix}.proj_out.weight"]
        + params[f"{prefix}.proj_out.bias"]
    )
    return d * valid[..., None].astype(d.dtype), cross
