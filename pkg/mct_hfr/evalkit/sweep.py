"""
Evaluation over a range of missing rates and the area under the
resulting score curves.
"""

from typing import Optional, Sequence
from dataclasses import dataclass, field
from pathlib import Path
import csv

import numpy as np

from mct_hfr.util import make_path, write_json
from mct_hfr.logger import Logger, LoggingContext as Context
from mct_hfr.logging import Logging
from mct_hfr.models import DataModel
from mct_hfr.datasim import MultimodalSample, apply_masking, collate
from mct_hfr.tensorlab import no_grad
from mct_hfr.mct import ModelConfig, check_compatible, mct_forward
from .metrics import SCORES, MetricsRecord, auilc, compute_metrics
from .metrics import mean_metrics
from .pool import ShardPool


DEFAULT_RATES = tuple(round(0.1 * i, 1) for i in range(10))
CSV_NAME = "sweep.csv"
REPORT_NAME = "sweep.json"
CONFUSION_NAME = "confusion.csv"
EMBEDDINGS_NAME = "embeddings.csv"


@dataclass
class SweepRun(DataModel):
    """
    Scores of one `(rate, mask seed)`-evaluation.

    Keyword arguments:
    rate -- missing rate
    seed -- mask seed
    metrics -- scores
    """

    rate: float
    seed: int
    metrics: MetricsRecord


@dataclass
class SweepReport(DataModel):
    """
    Result of a missing-rate sweep.

    Keyword arguments:
    rates -- strictly increasing missing rates
    mask_seeds -- mask seeds evaluated per rate
    means -- per-rate scores averaged over mask seeds
    runs -- individual evaluations in `(rate, seed)`-order
    area -- per-score area under the curve over `rates`; `None` if
            fewer than two rates were evaluated
    model -- model configuration
    samples -- number of evaluated samples
    checkpoint -- source checkpoint, if any
    log -- run messages
    """

    rates: list[float]
    mask_seeds: list[int]
    means: list[MetricsRecord]
    runs: list[SweepRun] = field(default_factory=list)
    area: Optional[dict[str, float]] = None
    model: Optional[ModelConfig] = None
    samples: int = 0
    checkpoint: Optional[str] = None
    log: Logger = field(default_factory=lambda: Logger(default_origin="Sweep"))

    @DataModel.serialization_handler("log")
    @classmethod
    def log_serialization(cls, value):
        """Performs `log`-serialization."""
        return value.json

    @DataModel.deserialization_handler("log")
    @classmethod
    def log_deserialization(cls, value):
        """Performs `log`-deserialization."""
        return Logger.from_json(value)

    def scores(self, name: str) -> list[float]:
        """Returns the seed-averaged score `name` per rate."""
        return [m.score(name) for m in self.means]

    def recompute_area(self) -> Optional[dict[str, float]]:
        """Returns the areas recomputed from the stored scores."""
        if len(self.rates) < 2:
            return None
        return {name: auilc(self.scores(name), self.rates) for name in SCORES}


@dataclass
class SweepShard:
    """Raw outcome of one `(rate, mask seed)`-evaluation."""

    rate: float
    seed: int
    predictions: np.ndarray
    labels: np.ndarray
    indices: np.ndarray
    embeddings: Optional[np.ndarray] = None


def _check_rates(rates: Sequence[float]) -> list[float]:
    _rates = [float(r) for r in rates]
    if len(_rates) == 0:
        raise ValueError("A sweep needs at least one missing rate.")
    if any(not 0 <= r <= 1 for r in _rates):
        raise ValueError(f"Missing rates must be in [0, 1] (got {_rates}).")
    if any(b <= a for a, b in zip(_rates, _rates[1:])):
        raise ValueError(
            f"Missing rates must be strictly increasing (got {_rates})."
        )
    return _rates


def evaluate_masked(
    params,
    cfg: ModelConfig,
    samples: Sequence[MultimodalSample],
    rate: float,
    seed: int,
    batch_size: int = 64,
    keep_embeddings: bool = False,
    max_lengths: Optional[Sequence[int]] = None,
) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Returns the predictions for `samples` ablated at `rate` (masks
    drawn from `(seed, sample.index)`) and, optionally, the fused
    vectors. Only the classifier branch is run. Sequences are clipped
    to `max_lengths` (default: the model's maximum lengths).
    """
    caps = cfg.max_lengths if max_lengths is None else max_lengths
    preds, fused = [], []
    with no_grad():
        for start in range(0, len(samples), batch_size):
            chunk = samples[start : start + batch_size]
            masks = [apply_masking(s, rate, seed)[1] for s in chunk]
            trace = mct_forward(collate(chunk, caps, masks), params, cfg)
            preds.append(trace.predictions())
            if keep_embeddings:
                fused.append(trace.fused.values.copy())
    return (
        np.concatenate(preds),
        np.concatenate(fused) if keep_embeddings else None,
    )


def sweep(
    params,
    cfg: ModelConfig,
    samples: Sequence[MultimodalSample],
    rates: Sequence[float] = DEFAULT_RATES,
    mask_seeds: Sequence[int] = (0,),
    workers: int = 1,
    batch_size: int = 64,
    keep_embeddings: bool = False,
    checkpoint: Optional[str] = None,
) -> tuple[SweepReport, list[SweepShard]]:
    """
    Evaluates a model at every missing rate in `rates` and for every
    mask seed, averages scores over seeds and integrates the averaged
    curves.

    Returns the report and the raw per-evaluation predictions (in
    `(rate, seed)`-order) for the figure-data writers.

    Keyword arguments:
    params -- model parameters (only read)
    cfg -- model configuration
    samples -- test samples
    rates -- strictly increasing missing rates
             (default 0.0, 0.1, ..., 0.9)
    mask_seeds -- mask seeds
                  (default (0,))
    workers -- number of threads evaluating `(rate, seed)`-shards
               (default 1)
    batch_size -- evaluation batch size
                  (default 64)
    keep_embeddings -- if `True`, keep the fused vectors of every
                       evaluation
                       (default False)
    checkpoint -- source checkpoint recorded in the report
                  (default None)
    """
    _rates = _check_rates(rates)
    _seeds = [int(s) for s in mask_seeds]
    if len(_seeds) == 0 or len(set(_seeds)) != len(_seeds):
        raise ValueError(
            f"Mask seeds must be unique and non-empty ({_seeds})."
        )
    if len(samples) == 0:
        raise ValueError("Cannot evaluate an empty dataset.")
    found_classes = max(cfg.classes, max(s.label for s in samples) + 1)
    for dims in sorted({tuple(s.dims) for s in samples}):
        check_compatible(cfg, found_classes, dims)

    report = SweepReport(
        rates=_rates,
        mask_seeds=_seeds,
        means=[],
        model=cfg,
        samples=len(samples),
        checkpoint=checkpoint,
    )
    report.log.log(
        Context.STARTUP,
        body=f"Evaluating {len(samples)} samples at {len(_rates)} missing "
        + f"rate(s) with {len(_seeds)} mask seed(s) on {workers} worker(s).",
    )
    labels = np.array([s.label for s in samples], dtype=np.int64)
    indices = np.array([s.index for s in samples], dtype=np.int64)

    def evaluate(shard: tuple[float, int]) -> SweepShard:
        rate, seed = shard
        preds, fused = evaluate_masked(
            params, cfg, samples, rate, seed, batch_size, keep_embeddings
        )
        Logging.debug(f"Evaluated missing rate {rate} with mask seed {seed}.")
        return SweepShard(rate, seed, preds, labels, indices, fused)

    shards = ShardPool(workers).map(
        evaluate, [(rate, seed) for rate in _rates for seed in _seeds]
    )

    for i, rate in enumerate(_rates):
        records = []
        for shard in shards[i * len(_seeds) : (i + 1) * len(_seeds)]:
            metrics = compute_metrics(shard.predictions, labels, cfg.classes)
            report.runs.append(
                SweepRun(rate=rate, seed=shard.seed, metrics=metrics)
            )
            records.append(metrics)
        report.means.append(mean_metrics(records))
        report.log.log(
            Context.EVALUATION,
            body=f"Missing rate {rate}: UA {report.means[-1].ua:.4f}, WA "
            + f"{report.means[-1].wa:.4f}.",
        )
    report.area = report.recompute_area()
    if report.area is None:
        report.log.log(
            Context.WARNING,
            body="Area under the curve is undefined for a single missing "
            + "rate.",
        )
    return report, shards


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def write_sweep(
    report: SweepReport,
    out_dir: str | Path,
    shards: Optional[Sequence[SweepShard]] = None,
) -> list[Path]:
    """
    Writes the structured report, the flat score table, and (if
    `shards` are given) the confusion counts and fused vectors.
    Returns the written files.
    """
    _out = make_path(out_dir)
    _out.mkdir(parents=True, exist_ok=True)
    written = [write_json(_out / REPORT_NAME, report.json)]

    with (_out / CSV_NAME).open("w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(["rate", "seed", "UA", "WA", "UF1", "WF1"])
        for run in report.runs:
            writer.writerow(
                [_fmt(run.rate), run.seed]
                + [_fmt(run.metrics.score(name)) for name in SCORES]
            )
    written.append(_out / CSV_NAME)

    if shards is None:
        return written

    with (_out / CONFUSION_NAME).open(
        "w", newline="", encoding="utf-8"
    ) as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(["rate", "seed", "truth", "pred", "count"])
        for run in report.runs:
            for truth, row in enumerate(run.metrics.confusion):
                for pred, count in enumerate(row):
                    writer.writerow(
                        [_fmt(run.rate), run.seed, truth, pred, count]
                    )
    written.append(_out / CONFUSION_NAME)

    if any(shard.embeddings is not None for shard in shards):
        with (_out / EMBEDDINGS_NAME).open(
            "w", newline="", encoding="utf-8"
        ) as file:
            writer = csv.writer(file, lineterminator="\n")
            width = next(
                s.embeddings.shape[1]
                for s in shards
                if s.embeddings is not None
            )
            writer.writerow(
                ["rate", "seed", "index", "label"]
                + [f"h{j}" for j in range(width)]
            )
            for shard in shards:
                if shard.embeddings is None:
                    continue
                for index, label, h in zip(
                    shard.indices, shard.labels, shard.embeddings
                ):
                    writer.writerow(
                        [_fmt(shard.rate), shard.seed, int(index), int(label)]
                        + [_fmt(float(x)) for x in h]
                    )
        written.append(_out / EMBEDDINGS_NAME)
    return written
