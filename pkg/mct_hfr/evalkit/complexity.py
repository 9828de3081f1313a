"""
Analytic parameter and multiply-accumulate (MAC) counts.

One multiply-accumulate counts as one MAC. Softmax, normalization and
activation costs are not counted.
"""

from typing import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from mct_hfr.util import MODALITIES
from mct_hfr.models import DataModel
from mct_hfr.mct import (
    ModelConfig,
    classifier_widths,
    mrau_layer_shapes,
    param_shapes,
)


DEFAULT_LENGTHS = (400, 40, 50)


class LayerKind(Enum):
    """Attention layer variants that can be counted."""

    MRAU = "mrau"
    PAIRWISE_REFERENCE = "pairwise_reference"


class CountMode(Enum):
    """Model variants that can be counted."""

    TRAINING = "training"
    INFERENCE = "inference"


@dataclass
class Complexity(DataModel):
    """
    Parameter and MAC count.

    Keyword arguments:
    name -- counted layer kind or model mode
    params -- number of scalar parameters
    macs -- multiply-accumulates for one instance
    lengths -- sequence lengths the MACs refer to
    """

    name: str
    params: int
    macs: int
    lengths: tuple[int, int, int]


def affine_params(d_in: int, d_out: int, bias: bool = True) -> int:
    """Returns the parameter count of an affine map."""
    return d_in * d_out + (d_out if bias else 0)


def _ffn_params(cfg: ModelConfig) -> int:
    return affine_params(cfg.d, cfg.hidden) + affine_params(cfg.hidden, cfg.d)


def _unit_params(cfg: ModelConfig, ffn: bool) -> int:
    # four bias-free projections, layer normalizations and optional FFN
    norms = 2 if ffn else 1
    return (
        4 * cfg.d * cfg.d
        + norms * 2 * cfg.d
        + (_ffn_params(cfg) if ffn else 0)
    )


def _attention_macs(d: int, t_q: int, t_k: int) -> int:
    # Q and output projections on the target, K and V on the source,
    # scores and weighted sum
    return 2 * t_q * d * d + 2 * t_k * d * d + 2 * t_q * t_k * d


def pairwise_layer_shapes(
    cfg: ModelConfig,
) -> list[tuple[str, tuple[int, ...]]]:
    """
    Returns the parameter layout of a reference layer made of one
    directional cross-modal unit (attention, FFN, two normalizations)
    per ordered pair of distinct modalities.
    """
    shapes = []
    for target in MODALITIES:
        for source in MODALITIES:
            if source == target:
                continue
            prefix = f"pairwise.{source}_to_{target}"
            shapes += [
                (f"{prefix}.{w}", (cfg.d, cfg.d))
                for w in ("wq", "wk", "wv", "wo")
            ]
            shapes += [
                (f"{prefix}.ffn1.weight", (cfg.d, cfg.hidden)),
                (f"{prefix}.ffn1.bias", (cfg.hidden,)),
                (f"{prefix}.ffn2.weight", (cfg.hidden, cfg.d)),
                (f"{prefix}.ffn2.bias", (cfg.d,)),
            ]
            for ln in ("ln1", "ln2"):
                shapes += [
                    (f"{prefix}.{ln}.gain", (cfg.d,)),
                    (f"{prefix}.{ln}.bias", (cfg.d,)),
                ]
    return shapes


def enumerate_params(shapes: Sequence[tuple[str, tuple[int, ...]]]) -> int:
    """Returns the number of scalars allocated for a layout."""
    return int(sum(np.prod(shape, dtype=np.int64) for _, shape in shapes))


def _checked(name: str, analytic: int, enumerated: int) -> int:
    if analytic != enumerated:
        raise RuntimeError(
            f"Analytic parameter count of '{name}' ({analytic}) differs "
            + f"from the allocated layout ({enumerated})."
        )
    return analytic


def _check_lengths(lengths: Sequence[int]) -> tuple[int, int, int]:
    _lengths = tuple(int(t) for t in lengths)
    if len(_lengths) != len(MODALITIES) or any(t < 1 for t in _lengths):
        raise ValueError(
            f"Expected {len(MODALITIES)} positive lengths (got "
            + f"{list(lengths)})."
        )
    return _lengths


def count_params_macs(
    cfg: ModelConfig,
    kind: LayerKind | str = LayerKind.MRAU,
    lengths: Sequence[int] = DEFAULT_LENGTHS,
) -> Complexity:
    """
    Returns parameters and MACs of a single attention layer.

    Keyword arguments:
    cfg -- model configuration (d, heads, FFN width)
    kind -- 'mrau' (one re-scaled unit per modality attending over the
            concatenation of all modalities) or 'pairwise_reference'
            (one directional cross-modal unit per ordered modality
            pair)
            (default LayerKind.MRAU)
    lengths -- per-modality sequence lengths for the MAC estimate
               (default (400, 40, 50))
    """
    _kind = LayerKind(kind)
    _lengths = _check_lengths(lengths)
    d, hidden, total = cfg.d, cfg.hidden, sum(_lengths)
    ffn_macs = 2 * d * hidden
    if _kind is LayerKind.MRAU:
        params = _checked(
            _kind.value,
            len(MODALITIES) * _unit_params(cfg, ffn=True),
            enumerate_params(mrau_layer_shapes(cfg)),
        )
        macs = sum(
            # Q, K, V and output projections act on the modality's own
            # steps; attention spans all steps
            4 * t * d * d + 2 * t * total * d + t * ffn_macs
            for t in _lengths
        )
    else:
        pairs = len(MODALITIES) * (len(MODALITIES) - 1)
        params = _checked(
            _kind.value,
            pairs * _unit_params(cfg, ffn=True),
            enumerate_params(pairwise_layer_shapes(cfg)),
        )
        macs = sum(
            _attention_macs(d, t_q, t_k) + t_q * ffn_macs
            for i, t_q in enumerate(_lengths)
            for j, t_k in enumerate(_lengths)
            if i != j
        )
    return Complexity(
        name=_kind.value, params=params, macs=int(macs), lengths=_lengths
    )


def count_model(
    cfg: ModelConfig,
    mode: CountMode | str = CountMode.TRAINING,
    lengths: Sequence[int] = DEFAULT_LENGTHS,
) -> Complexity:
    """
    Returns parameters and MACs of the whole model. The inference
    variant omits the reconstruction branch.

    Keyword arguments:
    cfg -- model configuration
    mode -- 'training' or 'inference'
            (default CountMode.TRAINING)
    lengths -- per-modality sequence lengths for the MAC estimate
               (default (400, 40, 50))
    """
    _mode = CountMode(mode)
    _lengths = _check_lengths(lengths)
    d = cfg.d
    widths = classifier_widths(cfg)

    params = sum(
        k * dim * d + d for k, dim in zip(cfg.kernel_sizes, cfg.dims)
    )
    layer = count_params_macs(cfg, LayerKind.MRAU, _lengths)
    params += cfg.layers * layer.params
    params += len(MODALITIES) * d
    params += sum(affine_params(a, b) for a, b in zip(widths[:-1], widths[1:]))

    macs = sum(
        t * k * dim * d
        for t, k, dim in zip(_lengths, cfg.kernel_sizes, cfg.dims)
    )
    macs += cfg.layers * layer.macs
    # pooling scores and weighted sums
    macs += sum(2 * t * d for t in _lengths)
    macs += sum(a * b for a, b in zip(widths[:-1], widths[1:]))

    if _mode is CountMode.TRAINING and cfg.lfi_enabled:
        unit = _unit_params(cfg, ffn=False)
        for dim, t in zip(cfg.dims, _lengths):
            params += (
                affine_params(dim, d)
                + 2 * cfg.decoder_blocks * unit
                + affine_params(d, dim)
            )
            macs += 2 * t * dim * d + cfg.decoder_blocks * 2 * _attention_macs(
                d, t, t
            )
    if _mode is CountMode.TRAINING and cfg.gfa_enabled:
        fused = len(MODALITIES) * d
        params += affine_params(fused, fused)
        macs += fused * fused

    return Complexity(
        name=_mode.value,
        params=_checked(
            _mode.value,
            params,
            enumerate_params(
                param_shapes(cfg, inference=_mode is CountMode.INFERENCE)
            ),
        ),
        macs=int(macs),
        lengths=_lengths,
    )
