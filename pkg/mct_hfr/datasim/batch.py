"""Batching of variable-length multimodal samples."""

from typing import Optional, Sequence
from dataclasses import dataclass

import numpy as np

from mct_hfr.util import MODALITIES
from .masking import draw_indicators
from .sample import MultimodalSample, MaskSet


@dataclass
class Batch:
    """
    Padded batch of samples. All per-modality arrays share the padded
    time extent `T` of that modality; positions at or beyond the true
    length are zero and never flagged as ablated.

    Keyword arguments:
    complete -- per-modality complete values `(B, T, d_m)`
    values -- per-modality (possibly) masked values `(B, T, d_m)`
    masks -- per-modality ablation indicators `(B, T)` (`uint8`)
    lengths -- per-modality true (clipped) lengths `(B,)`
    labels -- class labels `(B,)`
    incomplete -- per-sample flags marking samples selected for masking
    indices -- sample identifiers `(B,)`
    """

    complete: tuple[np.ndarray, ...]
    values: tuple[np.ndarray, ...]
    masks: tuple[np.ndarray, ...]
    lengths: tuple[np.ndarray, ...]
    labels: np.ndarray
    incomplete: np.ndarray
    indices: np.ndarray

    @property
    def size(self) -> int:
        """Returns the batch size."""
        return len(self.labels)

    @property
    def valid(self) -> tuple[np.ndarray, ...]:
        """Returns per-modality `(B, T)` masks of non-padding steps."""
        return tuple(
            np.arange(v.shape[1])[None, :] < length[:, None]
            for v, length in zip(self.values, self.lengths)
        )

    def complete_view(self) -> "Batch":
        """Returns the batch with masking undone."""
        return Batch(
            complete=self.complete,
            values=self.complete,
            masks=tuple(np.zeros_like(m) for m in self.masks),
            lengths=self.lengths,
            labels=self.labels,
            incomplete=np.zeros_like(self.incomplete),
            indices=self.indices,
        )

    def with_masks(
        self, masks: Sequence[np.ndarray], incomplete: np.ndarray
    ) -> "Batch":
        """
        Returns the batch with the given `(B, T)` indicators applied to
        the complete values (padding is never ablated).
        """
        _masks = tuple(
            (np.asarray(m, dtype=bool) & valid).astype(np.uint8)
            for m, valid in zip(masks, self.valid)
        )
        return Batch(
            complete=self.complete,
            values=tuple(
                np.where(m[..., None] == 1, 0, c).astype(c.dtype)
                for c, m in zip(self.complete, _masks)
            ),
            masks=_masks,
            lengths=self.lengths,
            labels=self.labels,
            incomplete=np.asarray(incomplete, dtype=bool),
            indices=self.indices,
        )


def collate(
    samples: Sequence[MultimodalSample],
    max_lens: Sequence[int],
    masks: Optional[Sequence[Optional[MaskSet]]] = None,
    pad_to: Optional[Sequence[int]] = None,
) -> Batch:
    """
    Truncates sequences to their prefix of at most `max_lens` steps and
    zero-pads them to a common extent per modality.

    Keyword arguments:
    samples -- non-empty list of complete samples
    max_lens -- per-modality maximum lengths
    masks -- optional per-sample `MaskSet`s (`None` for complete
             samples) applied after truncation
             (default None)
    pad_to -- optional per-modality padded extent; needs to be at
              least the longest clipped length
              (default None; pad to the longest clipped length)
    """
    if len(samples) == 0:
        raise ValueError("Cannot collate an empty list of samples.")
    if len(max_lens) != len(MODALITIES):
        raise ValueError(
            f"Expected {len(MODALITIES)} maximum lengths (got "
            + f"{len(max_lens)})."
        )
    _masks = list(masks) if masks is not None else [None] * len(samples)
    if len(_masks) != len(samples):
        raise ValueError(
            f"Got {len(_masks)} mask sets for {len(samples)} samples."
        )
    batch_size = len(samples)
    complete, indicators, lengths = [], [], []
    for m, cap in enumerate(max_lens):
        clipped = np.array([min(s.lengths[m], cap) for s in samples])
        extent = int(clipped.max())
        if pad_to is not None:
            if pad_to[m] < extent:
                raise ValueError(
                    f"Padded extent {pad_to[m]} of modality "
                    + f"'{MODALITIES[m]}' is below longest length {extent}."
                )
            extent = int(pad_to[m])
        dim = samples[0].dims[m]
        values = np.zeros((batch_size, extent, dim), dtype=np.float32)
        mask = np.zeros((batch_size, extent), dtype=np.uint8)
        for i, (sample, length) in enumerate(zip(samples, clipped)):
            if sample.dims[m] != dim:
                raise ValueError(
                    f"Sample {sample.index} has dimension {sample.dims[m]} "
                    + f"in modality '{MODALITIES[m]}' (expected {dim})."
                )
            values[i, :length] = sample.sequences[m][:length]
            if _masks[i] is not None:
                mask[i, :length] = _masks[i].indicators[m][:length]
        complete.append(values)
        indicators.append(mask)
        lengths.append(clipped)
    batch = Batch(
        complete=tuple(complete),
        values=tuple(complete),
        masks=tuple(np.zeros_like(m) for m in indicators),
        lengths=tuple(lengths),
        labels=np.array([s.label for s in samples], dtype=np.int64),
        incomplete=np.zeros(batch_size, dtype=bool),
        indices=np.array([s.index for s in samples], dtype=np.int64),
    )
    if masks is None:
        return batch
    return batch.with_masks(
        indicators, np.array([m is not None for m in _masks])
    )


def mask_batch(
    batch: Batch,
    p_miss: float,
    rng: np.random.Generator,
    rows: Optional[np.ndarray] = None,
) -> Batch:
    """
    Returns `batch` with freshly drawn Bernoulli(`p_miss`) ablations
    applied to the samples selected by `rows`.

    Keyword arguments:
    batch -- batch of complete values
    p_miss -- per-step ablation probability
    rng -- mask stream
    rows -- boolean per-sample selection
            (default None; all samples)
    """
    _rows = (
        np.ones(batch.size, dtype=bool)
        if rows is None
        else np.asarray(rows, dtype=bool)
    )
    masks = [
        draw_indicators(rng, valid.shape, p_miss) * _rows[:, None]
        for valid in batch.valid
    ]
    return batch.with_masks(masks, _rows)
