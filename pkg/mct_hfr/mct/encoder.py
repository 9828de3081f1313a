"""Unimodal encoding: temporal convolution plus sinusoidal positions."""

from typing import Optional
from functools import lru_cache

import numpy as np

from mct_hfr.errors import DimensionError
from mct_hfr.util import MODALITIES
from mct_hfr.tensorlab import Tensor, conv1d_temporal
from .config import ModelConfig


@lru_cache(maxsize=32)
def _positional_encoding(length: int, d: int) -> np.ndarray:
    t = np.arange(length)[:, None]
    j = np.arange(d)[None, :]
    angles = t / np.power(10000.0, 2 * (j // 2) / d)
    pe = np.where(j % 2 == 0, np.sin(angles), np.cos(angles))
    pe.setflags(write=False)
    return pe


def positional_encoding(length: int, d: int) -> np.ndarray:
    """
    Returns the `(length, d)` sinusoidal position table with
    `PE[t, 2i] = sin(t / 10000^(2i/d))` and
    `PE[t, 2i+1] = cos(t / 10000^(2i/d))`.
    """
    return _positional_encoding(length, d)


def unimodal_encode(
    x: Tensor,
    modality: str,
    params,
    cfg: ModelConfig,
    valid: Optional[np.ndarray] = None,
) -> Tensor:
    """
    Encodes one modality into the shared width:
    `H_m = Conv1D(X_m) + PE`; padded positions are zeroed.

    Keyword arguments:
    x -- input `(B, T, d_m)` or `(T, d_m)`
    modality -- modality identifier
    params -- parameter mapping
    cfg -- model configuration
    valid -- optional boolean `(B, T)` (or `(T,)`) of non-padding steps
             (default None; all steps valid)
    """
    m = MODALITIES.index(modality)
    if x.shape[-1] != cfg.dims[m]:
        raise DimensionError(
            f"unimodal_encode[{modality}]",
            x.shape,
            (cfg.dims[m],),
            detail="feature dimension",
        )
    h = conv1d_temporal(
        x,
        params[f"encoder.{modality}.conv.weight"],
        params[f"encoder.{modality}.conv.bias"],
    ) + positional_encoding(x.shape[-2], cfg.d).astype(x.dtype)
    if valid is None:
        return h
    return h * valid[..., None].astype(x.dtype)
