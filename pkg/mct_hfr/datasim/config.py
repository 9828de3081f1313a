"""Configuration of the synthetic data generator."""

from dataclasses import dataclass

from mct_hfr.errors import ConfigError
from mct_hfr.models import DataModel
from mct_hfr.util import MODALITIES


@dataclass
class GenConfig(DataModel):
    """
    Synthetic unaligned multimodal dataset settings.

    Keyword arguments:
    seed -- base seed of all generator streams
    classes -- number of classes C
               (default 4)
    dims -- per-modality feature dimensions (d_a, d_v, d_l)
            (default (20, 16, 24))
    length_ranges -- per-modality inclusive ranges of sequence lengths
                     (default ((50, 150), (10, 30), (12, 40)))
    max_lengths -- per-modality hard caps of generated lengths
                   (default (400, 40, 50))
    snr -- signal-to-noise ratio; noise has standard deviation
           `1/sqrt(snr)`
           (default 4.0)
    redundancy -- probability rho that one random modality of a sample
                  carries an attenuated prototype only
                  (default 0.5)
    attenuation -- prototype scale of an attenuated modality
                   (default 0.2)
    """

    seed: int
    classes: int = 4
    dims: tuple[int, int, int] = (20, 16, 24)
    length_ranges: tuple[tuple[int, int], ...] = (
        (50, 150),
        (10, 30),
        (12, 40),
    )
    max_lengths: tuple[int, int, int] = (400, 40, 50)
    snr: float = 4.0
    redundancy: float = 0.5
    attenuation: float = 0.2

    def __post_init__(self):
        self.dims = tuple(self.dims)
        self.length_ranges = tuple(tuple(r) for r in self.length_ranges)
        self.max_lengths = tuple(self.max_lengths)
        problems = []
        if self.classes < 2:
            problems.append(
                f"classes must be at least 2 (got {self.classes})."
            )
        for name in ("dims", "length_ranges", "max_lengths"):
            if len(getattr(self, name)) != len(MODALITIES):
                problems.append(
                    f"{name} needs {len(MODALITIES)} entries (got "
                    + f"{len(getattr(self, name))})."
                )
        if not problems:
            for m, (lo, hi), cap, dim in zip(
                MODALITIES, self.length_ranges, self.max_lengths, self.dims
            ):
                if not 1 <= lo <= hi <= cap:
                    problems.append(
                        f"length range of modality '{m}' must satisfy "
                        + f"1 <= lo <= hi <= {cap} (got ({lo}, {hi}))."
                    )
                if dim < 1:
                    problems.append(
                        f"dimension of modality '{m}' must be positive."
                    )
        if self.snr <= 0:
            problems.append(f"snr must be positive (got {self.snr}).")
        if not 0 <= self.redundancy <= 1:
            problems.append(
                f"redundancy must be in [0, 1] (got {self.redundancy})."
            )
        if not 0 <= self.attenuation <= 1:
            problems.append(
                f"attenuation must be in [0, 1] (got {self.attenuation})."
            )
        if problems:
            raise ConfigError(problems)
