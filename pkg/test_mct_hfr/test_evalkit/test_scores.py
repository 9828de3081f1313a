"""Test module for classification scores and the area under the curve."""

import numpy as np
import pytest

from mct_hfr.models.data_model import get_model_serialization_test
from mct_hfr.evalkit import (
    DEFAULT_RATES,
    MetricsRecord,
    auilc,
    compute_metrics,
    mean_metrics,
)


test_metrics_record_serialization = get_model_serialization_test(
    MetricsRecord,
    (
        MetricsRecord(ua=0.5, wa=0.25, uf1=0.1, wf1=0.2),
        MetricsRecord(ua=1, wa=1, uf1=1, wf1=1, confusion=[[1, 0], [0, 1]]),
    ),
)


def test_compute_metrics_hand_example():
    """Test `compute_metrics` against hand-computed scores."""
    record = compute_metrics([0, 1, 1, 1], [0, 0, 1, 1], 2)
    assert record.ua == pytest.approx(0.75)
    assert record.wa == pytest.approx(0.75)
    assert record.uf1 == pytest.approx((2 / 3 + 0.8) / 2)
    assert record.wf1 == pytest.approx(0.73333, abs=1e-5)
    assert record.confusion == [[1, 1], [0, 2]]


def test_compute_metrics_perfect():
    """Test `compute_metrics` for perfect predictions."""
    record = compute_metrics([2, 0, 1, 3], [2, 0, 1, 3], 4)
    assert (record.ua, record.wa, record.uf1, record.wf1) == (1, 1, 1, 1)


def test_compute_metrics_single_class_predictions():
    """Test `compute_metrics` for a constant predictor."""
    record = compute_metrics([0] * 8, [0, 1, 2, 3] * 2, 4)
    assert record.ua == pytest.approx(0.25)
    assert record.wa == pytest.approx(0.25)


def test_compute_metrics_zero_support():
    """Test that classes without support do not enter macro averages."""
    record = compute_metrics([0, 0, 1, 2], [0, 0, 1, 1], 3)
    assert record.ua == pytest.approx(0.75)
    assert len(record.confusion) == 3
    assert record.confusion[1] == [0, 1, 1]


def test_compute_metrics_weighted_accuracy_is_trace(rng):
    """Test that WA equals the confusion-matrix trace over the total."""
    truth = rng.integers(0, 4, size=50)
    preds = rng.integers(0, 4, size=50)
    record = compute_metrics(preds, truth, 4)
    confusion = np.array(record.confusion)
    assert confusion.sum() == 50
    assert record.wa == pytest.approx(np.trace(confusion) / 50)
    for score in (record.ua, record.uf1, record.wf1):
        assert 0 <= score <= 1


def test_compute_metrics_permutation_invariance(rng):
    """Test that shuffling prediction/label pairs keeps all scores."""
    truth = rng.integers(0, 3, size=40)
    preds = rng.integers(0, 3, size=40)
    order = rng.permutation(40)
    assert compute_metrics(preds, truth, 3) == compute_metrics(
        preds[order], truth[order], 3
    )


@pytest.mark.parametrize(
    ("preds", "truth"),
    [([], []), ([0, 1], [0]), ([0, 3], [0, 1]), ([0, 1], [-1, 1])],
    ids=["empty", "length", "pred-range", "label-range"],
)
def test_compute_metrics_rejects(preds, truth):
    """Test input validation of `compute_metrics`."""
    with pytest.raises(ValueError):
        compute_metrics(preds, truth, 3)


def test_mean_metrics():
    """Test averaging of records."""
    a = compute_metrics([0, 1], [0, 1], 2)
    b = compute_metrics([1, 0], [0, 1], 2)
    mean = mean_metrics([a, b])
    assert mean.ua == pytest.approx(0.5)
    assert mean.confusion == [[1, 1], [1, 1]]
    with pytest.raises(ValueError):
        mean_metrics([])


def test_auilc_constant():
    """Test the area under a constant curve."""
    assert auilc([0.7] * 10, DEFAULT_RATES) == pytest.approx(0.63, abs=1e-12)


def test_auilc_triangle():
    """Test the area of a triangle."""
    assert auilc([1.0, 0.0], [0.0, 0.9]) == pytest.approx(0.45, abs=1e-12)


def test_auilc_riemann_oracle(rng):
    """Test piecewise-linear curves against a fine midpoint sum."""
    n = 1_000_000
    step = 0.9 / n
    midpoints = (np.arange(n) + 0.5) * step
    for _ in range(3):
        scores = rng.uniform(size=10)
        oracle = np.interp(midpoints, DEFAULT_RATES, scores).sum() * step
        assert auilc(scores, DEFAULT_RATES) == pytest.approx(oracle, abs=1e-9)


def test_auilc_linearity(rng):
    """Test that the area is linear in the scores."""
    scores = rng.uniform(size=10)
    a, b = 0.5, 0.2
    assert auilc(a * scores + b, DEFAULT_RATES) == pytest.approx(
        a * auilc(scores, DEFAULT_RATES) + b * 0.9, abs=1e-12
    )


@pytest.mark.parametrize(
    ("scores", "rates"),
    [
        ([0.5, 0.4, 0.3], [0.0, 0.2, 0.1]),
        ([0.5, 0.4], [0.0, 0.0]),
        ([0.5], [0.0]),
        ([0.5, 0.4], [0.0, 0.1, 0.2]),
        ([0.5, np.nan], [0.0, 0.1]),
    ],
    ids=["unsorted", "repeated", "single", "length", "nan"],
)
def test_auilc_rejects(scores, rates):
    """Test input validation of `auilc`."""
    with pytest.raises(ValueError):
        auilc(scores, rates)
