"""
Synthetic unaligned multimodal data: class prototypes are placed into
noisy sequences of independently drawn per-modality lengths.
"""

from typing import Optional
from dataclasses import replace

import numpy as np

from mct_hfr.util import (
    get_rng,
    STREAM_PROTOTYPE,
    STREAM_SAMPLE,
    STREAM_LABEL,
    STREAM_SPLIT,
)
from .config import GenConfig
from .sample import MultimodalSample


_PROTOTYPE_CYCLES = (1, 2, 3)
_PROTOTYPE_AMPLITUDE = 0.5


class Prototypes:
    """
    Fixed per-class and per-modality prototype waveforms.

    A prototype maps a relative position `s` in `[0, 1)` inside its
    window to a feature vector: a class offset (orthonormal across
    classes whenever `d_m >= C`) plus sinusoids with an integer number
    of cycles per window.

    Keyword arguments:
    cfg -- generator configuration
    """

    def __init__(self, cfg: GenConfig) -> None:
        self.cfg = cfg
        self.offsets: list[np.ndarray] = []
        self.cycles: list[np.ndarray] = []
        self.phases: list[np.ndarray] = []
        for m, dim in enumerate(cfg.dims):
            rng = get_rng(cfg.seed, STREAM_PROTOTYPE, m)
            basis = rng.normal(size=(dim, max(dim, cfg.classes)))
            if dim >= cfg.classes:
                q, _ = np.linalg.qr(basis[:, : cfg.classes])
                offsets = q.T
            else:
                offsets = basis[:, : cfg.classes].T
                offsets /= np.linalg.norm(offsets, axis=1, keepdims=True)
            self.offsets.append(offsets * np.sqrt(dim))
            self.cycles.append(
                rng.choice(_PROTOTYPE_CYCLES, size=(cfg.classes, dim))
            )
            self.phases.append(
                rng.uniform(0, 2 * np.pi, size=(cfg.classes, dim))
            )

    def evaluate(self, label: int, modality: int, width: int) -> np.ndarray:
        """Returns the prototype sampled at `width` window positions."""
        s = (np.arange(width) + 0.5)[:, None] / width
        return self.offsets[modality][label] + _PROTOTYPE_AMPLITUDE * np.sin(
            2 * np.pi * self.cycles[modality][label] * s
            + self.phases[modality][label]
        )


def balanced_labels(cfg: GenConfig, n: int) -> np.ndarray:
    """Returns `n` labels with class counts differing by at most one."""
    return get_rng(cfg.seed, STREAM_LABEL).permutation(
        np.arange(n) % cfg.classes
    )


def generate_sample(
    cfg: GenConfig,
    index: int,
    label: int,
    prototypes: Optional[Prototypes] = None,
) -> MultimodalSample:
    """
    Generates sample `index` of class `label` from its own
    `(seed, index)`-stream.
    """
    _prototypes = prototypes or Prototypes(cfg)
    rng = get_rng(cfg.seed, STREAM_SAMPLE, index)
    noise_std = 1 / np.sqrt(cfg.snr)
    scales = np.ones(len(cfg.dims))
    if rng.uniform() < cfg.redundancy:
        scales[rng.integers(len(cfg.dims))] = cfg.attenuation
    sequences = []
    for m, ((lo, hi), dim) in enumerate(zip(cfg.length_ranges, cfg.dims)):
        length = int(rng.integers(lo, hi + 1))
        width = max(1, int(round(rng.uniform(0.3, 0.7) * length)))
        start = int(rng.integers(0, length - width + 1))
        values = rng.normal(scale=noise_std, size=(length, dim))
        values[start : start + width] += scales[m] * _prototypes.evaluate(
            label, m, width
        )
        sequences.append(values.astype(np.float32))
    return MultimodalSample(
        sequences=tuple(sequences), label=int(label), index=index
    )


def generate_dataset(cfg: GenConfig, n: int) -> list[MultimodalSample]:
    """
    Generates a dataset of `n` samples; bit-identical for identical
    `(cfg, n)`.

    Keyword arguments:
    cfg -- generator configuration
    n -- number of samples
    """
    if n < 1:
        raise ValueError(f"Dataset size must be positive (got {n}).")
    prototypes = Prototypes(cfg)
    return [
        generate_sample(cfg, i, label, prototypes)
        for i, label in enumerate(balanced_labels(cfg, n))
    ]


def scaled_lengths(cfg: GenConfig, factor: float) -> GenConfig:
    """
    Returns a copy of `cfg` whose length ranges and caps are scaled by
    `factor` (prototypes stay identical since they only depend on the
    seed, class count and dimensions).
    """
    return replace(
        cfg,
        length_ranges=tuple(
            (max(1, int(round(lo * factor))), max(1, int(round(hi * factor))))
            for lo, hi in cfg.length_ranges
        ),
        max_lengths=tuple(
            max(1, int(round(cap * factor))) for cap in cfg.max_lengths
        ),
    )


def split_dataset(
    samples: list[MultimodalSample], fraction: float, seed: int
) -> tuple[list[MultimodalSample], list[MultimodalSample]]:
    """
    Splits `samples` into two disjoint parts where the second holds
    `round(fraction * len(samples))` samples chosen by a seeded
    permutation. Sample order within each part is preserved.
    """
    if not 0 < fraction < 1:
        raise ValueError(f"Split fraction must be in (0, 1) (got {fraction}).")
    count = int(round(fraction * len(samples)))
    if count == 0 or count == len(samples):
        raise ValueError(
            f"Cannot split {len(samples)} samples with fraction {fraction} "
            + "into two non-empty parts."
        )
    chosen = set(
        get_rng(seed, STREAM_SPLIT).permutation(len(samples))[:count].tolist()
    )
    return (
        [s for i, s in enumerate(samples) if i not in chosen],
        [s for i, s in enumerate(samples) if i in chosen],
    )
