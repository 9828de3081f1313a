"""Classification scores and the area under the missing-rate curve."""

from typing import Sequence
from dataclasses import dataclass, field

import numpy as np
from sklearn.metrics import (
    accuracy_score,
    auc,
    confusion_matrix,
    f1_score,
    recall_score,
)

from mct_hfr.models import DataModel


SCORES = ("ua", "wa", "uf1", "wf1")


@dataclass
class MetricsRecord(DataModel):
    """
    Classification scores.

    Keyword arguments:
    ua -- unweighted accuracy (macro recall over classes with support)
    wa -- weighted accuracy (overall accuracy)
    uf1 -- macro F1 over classes with support
    wf1 -- support-weighted F1
    confusion -- confusion matrix (rows: truth, columns: prediction)
    """

    ua: float
    wa: float
    uf1: float
    wf1: float
    confusion: list[list[int]] = field(default_factory=list)

    def score(self, name: str) -> float:
        """Returns the score `name` (one of `SCORES`)."""
        if name not in SCORES:
            raise ValueError(
                f"Unknown score '{name}'. Possible values are: "
                + f"{', '.join(SCORES)}."
            )
        return getattr(self, name)


def compute_metrics(
    preds: Sequence[int] | np.ndarray,
    truth: Sequence[int] | np.ndarray,
    classes: int,
) -> MetricsRecord:
    """
    Returns the scores of predictions `preds` against labels `truth`.

    Classes without support in `truth` are left out of the macro
    averages.
    """
    _preds = np.asarray(preds, dtype=np.int64)
    _truth = np.asarray(truth, dtype=np.int64)
    if _preds.size == 0:
        raise ValueError("Cannot score an empty set of predictions.")
    if _preds.shape != _truth.shape or _preds.ndim != 1:
        raise ValueError(
            f"Predictions and labels differ in shape ({_preds.shape} vs. "
            + f"{_truth.shape})."
        )
    if min(_preds.min(), _truth.min()) < 0 or max(
        _preds.max(), _truth.max()
    ) >= classes:
        raise ValueError(f"Labels need to be in [0, {classes}).")
    present = np.unique(_truth)
    macro = {"labels": present, "average": "macro", "zero_division": 0}
    return MetricsRecord(
        ua=float(recall_score(_truth, _preds, **macro)),
        wa=float(accuracy_score(_truth, _preds)),
        uf1=float(f1_score(_truth, _preds, **macro)),
        wf1=float(
            f1_score(_truth, _preds, **(macro | {"average": "weighted"}))
        ),
        confusion=confusion_matrix(
            _truth, _preds, labels=np.arange(classes)
        ).tolist(),
    )


def mean_metrics(records: Sequence[MetricsRecord]) -> MetricsRecord:
    """
    Returns the score-wise mean of `records`; confusion matrices are
    summed.
    """
    if len(records) == 0:
        raise ValueError("Cannot average an empty list of records.")
    return MetricsRecord(
        **{
            name: float(np.mean([r.score(name) for r in records]))
            for name in SCORES
        },
        confusion=np.sum([r.confusion for r in records], axis=0).tolist(),
    )


def auilc(scores: Sequence[float], rates: Sequence[float]) -> float:
    """
    Returns the trapezoid-rule area under `scores` over the strictly
    increasing missing rates `rates`.
    """
    _scores = np.asarray(scores, dtype=np.float64)
    _rates = np.asarray(rates, dtype=np.float64)
    if _scores.shape != _rates.shape or _rates.ndim != 1:
        raise ValueError(
            f"Got {_scores.size} scores for {_rates.size} missing rates."
        )
    if _rates.size < 2:
        raise ValueError("The area needs at least two missing rates.")
    if not (np.diff(_rates) > 0).all():
        raise ValueError(
            "Missing rates must be strictly increasing (got "
            + f"{_rates.tolist()})."
        )
    if not (np.isfinite(_scores).all() and np.isfinite(_rates).all()):
        raise ValueError("Scores and missing rates must be finite.")
    return float(auc(_rates, _scores))
