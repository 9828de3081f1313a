"""
Random per-time-step feature ablation: `X_m = X̄_m` with every ablated
step replaced by the zero vector.
"""

import numpy as np

from mct_hfr.util import get_rng, STREAM_MASK
from .sample import MultimodalSample, MaskSet


def _check_rate(p_miss: float) -> None:
    if not 0 <= p_miss <= 1:
        raise ValueError(f"Missing rate must be in [0, 1] (got {p_miss}).")


def draw_indicators(
    rng: np.random.Generator, shape: tuple[int, ...], p_miss: float
) -> np.ndarray:
    """
    Returns `uint8` Bernoulli(`p_miss`) indicators of the given shape.

    Uses one uniform number per entry so that, for a fixed stream,
    indicators at a lower rate are a subset of those at a higher rate.
    """
    _check_rate(p_miss)
    return (rng.uniform(size=shape) < p_miss).astype(np.uint8)


def apply_masking(
    sample: MultimodalSample,
    p_miss: float,
    seed: int,
    stream: int = STREAM_MASK,
) -> tuple[MultimodalSample, MaskSet]:
    """
    Ablates each time step of each modality independently with
    probability `p_miss`. Deterministic given `(seed, stream,
    sample.index, p_miss)`.

    Keyword arguments:
    sample -- complete sample
    p_miss -- per-step ablation probability
    seed -- mask seed
    stream -- stream identifier (see `mct_hfr.util`)
              (default `STREAM_MASK`; used for evaluation)
    """
    _check_rate(p_miss)
    rng = get_rng(seed, stream, sample.index)
    indicators = tuple(
        draw_indicators(rng, (length,), p_miss) for length in sample.lengths
    )
    return (
        sample.replace(
            sequences=tuple(
                np.where(mask[:, None] == 1, 0, seq).astype(seq.dtype)
                for seq, mask in zip(sample.sequences, indicators)
            )
        ),
        MaskSet(indicators),
    )
