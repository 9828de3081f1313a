"""
Evaluation by sequence length and on sequences beyond the trained
lengths.
"""

from typing import Optional, Sequence
from dataclasses import dataclass, field

import numpy as np

from mct_hfr.util import get_rng, STREAM_EXTRAPOLATION
from mct_hfr.models import DataModel
from mct_hfr.datasim import (
    GenConfig,
    MultimodalSample,
    Prototypes,
    generate_sample,
    scaled_lengths,
)
from mct_hfr.mct import ModelConfig
from .metrics import MetricsRecord, compute_metrics
from .sweep import evaluate_masked


@dataclass
class LengthInterval(DataModel):
    """
    Scores of the samples whose total length lies in `[lower, upper)`.

    Keyword arguments:
    lower -- inclusive lower bound
    upper -- exclusive upper bound
    count -- number of samples in the interval
    metrics -- scores (`None` for empty intervals)
    """

    lower: int
    upper: int
    count: int
    metrics: Optional[MetricsRecord] = None


@dataclass
class LengthReport(DataModel):
    """
    Scores grouped by total sequence length.

    Keyword arguments:
    intervals -- per-interval scores
    overall -- scores over all samples
    """

    intervals: list[LengthInterval] = field(default_factory=list)
    overall: Optional[MetricsRecord] = None


def total_lengths(
    samples: Sequence[MultimodalSample], max_lengths: Sequence[int]
) -> np.ndarray:
    """Returns the summed (clipped) lengths of every sample."""
    return np.array(
        [
            sum(min(t, cap) for t, cap in zip(s.lengths, max_lengths))
            for s in samples
        ],
        dtype=np.int64,
    )


def evaluate_by_length(
    params,
    cfg: ModelConfig,
    samples: Sequence[MultimodalSample],
    edges: Sequence[int],
    batch_size: int = 64,
) -> LengthReport:
    """
    Groups `samples` by their total (clipped) sequence length into the
    intervals `[edges[i], edges[i + 1])` and scores every interval.
    Samples outside all intervals only count towards `overall`.
    """
    _edges = [int(e) for e in edges]
    if len(_edges) < 2 or any(b <= a for a, b in zip(_edges, _edges[1:])):
        raise ValueError(
            f"Need at least two strictly increasing edges (got {_edges})."
        )
    if len(samples) == 0:
        raise ValueError("Cannot evaluate an empty dataset.")
    preds, _ = evaluate_masked(params, cfg, samples, 0.0, 0, batch_size)
    labels = np.array([s.label for s in samples], dtype=np.int64)
    totals = total_lengths(samples, cfg.max_lengths)
    report = LengthReport(overall=compute_metrics(preds, labels, cfg.classes))
    for lower, upper in zip(_edges, _edges[1:]):
        selected = (totals >= lower) & (totals < upper)
        report.intervals.append(
            LengthInterval(
                lower=lower,
                upper=upper,
                count=int(selected.sum()),
                metrics=(
                    compute_metrics(
                        preds[selected], labels[selected], cfg.classes
                    )
                    if selected.any()
                    else None
                ),
            )
        )
    return report


@dataclass
class ExtrapolationResult(DataModel):
    """
    Scores on test sequences at the trained and at scaled lengths.

    Keyword arguments:
    factor -- length scaling factor
    base -- scores at the trained lengths
    scaled -- scores at the scaled lengths
    """

    factor: float
    base: MetricsRecord
    scaled: MetricsRecord

    @property
    def ua_drop(self) -> float:
        """Returns the loss of unweighted accuracy due to scaling."""
        return self.base.ua - self.scaled.ua


def extrapolation_samples(
    gen_cfg: GenConfig, n: int, factor: float, first_index: int = 1_000_000
) -> tuple[list[MultimodalSample], list[MultimodalSample]]:
    """
    Returns `n` test samples at the configured lengths and `n` samples
    with the same labels at lengths scaled by `factor`. Both sets share
    the class prototypes of `gen_cfg` and use sample indices starting
    at `first_index`.
    """
    if n < 1:
        raise ValueError(f"Need at least one sample (got {n}).")
    if factor <= 0:
        raise ValueError(f"Scaling factor must be positive (got {factor}).")
    labels = get_rng(gen_cfg.seed, STREAM_EXTRAPOLATION).permutation(
        np.arange(n) % gen_cfg.classes
    )
    long_cfg = scaled_lengths(gen_cfg, factor)
    prototypes = Prototypes(gen_cfg)
    return (
        [
            generate_sample(gen_cfg, first_index + i, int(y), prototypes)
            for i, y in enumerate(labels)
        ],
        [
            generate_sample(long_cfg, first_index + i, int(y), prototypes)
            for i, y in enumerate(labels)
        ],
    )


def length_extrapolation(
    params,
    cfg: ModelConfig,
    gen_cfg: GenConfig,
    n: int,
    factor: float = 2.0,
    batch_size: int = 64,
) -> ExtrapolationResult:
    """
    Evaluates a trained model on fresh test samples at the generator's
    lengths and on samples `factor` times longer. Scaled sequences are
    clipped at `factor` times the model's maximum lengths while the
    re-scaling factors keep referring to the trained maximum lengths.
    """
    base, scaled = extrapolation_samples(gen_cfg, n, factor)
    labels = np.array([s.label for s in base], dtype=np.int64)
    long_caps = tuple(
        max(1, int(round(t * factor))) for t in cfg.max_lengths
    )
    preds, _ = evaluate_masked(params, cfg, base, 0.0, 0, batch_size)
    long_preds, _ = evaluate_masked(
        params, cfg, scaled, 0.0, 0, batch_size, max_lengths=long_caps
    )
    return ExtrapolationResult(
        factor=factor,
        base=compute_metrics(preds, labels, cfg.classes),
        scaled=compute_metrics(long_preds, labels, cfg.classes),
    )
