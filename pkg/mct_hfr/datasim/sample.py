"""Sample- and mask-records."""

from typing import Optional
from dataclasses import dataclass

import numpy as np


@dataclass
class MultimodalSample:
    """
    One multimodal instance.

    Keyword arguments:
    sequences -- per-modality complete feature sequences, arrays of
                 shape `(T_m, d_m)`
    label -- class index
    index -- sample identifier (used to derive mask streams)
             (default 0)
    """

    sequences: tuple[np.ndarray, ...]
    label: int
    index: int = 0

    @property
    def lengths(self) -> tuple[int, ...]:
        """Returns the per-modality true lengths."""
        return tuple(s.shape[0] for s in self.sequences)

    @property
    def dims(self) -> tuple[int, ...]:
        """Returns the per-modality feature dimensions."""
        return tuple(s.shape[1] for s in self.sequences)

    def replace(
        self, sequences: Optional[tuple[np.ndarray, ...]] = None
    ) -> "MultimodalSample":
        """Returns a copy with the given sequences."""
        return MultimodalSample(
            sequences=self.sequences if sequences is None else sequences,
            label=self.label,
            index=self.index,
        )


@dataclass
class MaskSet:
    """
    Per-modality ablation indicators (1 = ablated, 0 = kept).

    Keyword arguments:
    indicators -- per-modality `uint8` vectors of length `T_m`
    """

    indicators: tuple[np.ndarray, ...]

    @property
    def count(self) -> int:
        """Returns the total number of ablated steps."""
        return int(sum(int(i.sum()) for i in self.indicators))

    @property
    def any(self) -> bool:
        """Returns `True` if at least one step is ablated."""
        return self.count > 0
