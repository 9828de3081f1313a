"""Test module for the alignment distances."""

import numpy as np
import pytest

from mct_hfr.errors import DimensionError
from mct_hfr.tensorlab import Tensor, check_gradients
from mct_hfr.hfr import (
    METRIC_OPTIONS,
    load_metric,
    cmd,
    cosine_distance,
    jsd,
    smooth_l1_distance,
)


def _naive_cmd(x1, x2, order):
    n, dim = x1.shape
    mean1 = [sum(x1[i, j] for i in range(n)) / n for j in range(dim)]
    mean2 = [sum(x2[i, j] for i in range(n)) / n for j in range(dim)]
    total = np.sqrt(sum((mean1[j] - mean2[j]) ** 2 for j in range(dim)))
    for k in range(2, order + 1):
        squares = 0.0
        for j in range(dim):
            c1 = sum((x1[i, j] - mean1[j]) ** k for i in range(n)) / n
            c2 = sum((x2[i, j] - mean2[j]) ** k for i in range(n)) / n
            squares += (c1 - c2) ** 2
        total += np.sqrt(squares)
    return total


def test_cmd_reference(rng):
    """Test `cmd` against an explicit moment-by-moment computation."""
    for _ in range(50):
        x1 = rng.normal(size=(16, 12))
        x2 = rng.normal(loc=0.3, scale=1.2, size=(16, 12))
        assert cmd(Tensor(x1), Tensor(x2), 5).item() == pytest.approx(
            _naive_cmd(x1, x2, 5), abs=1e-10
        )


def test_cmd_identical(rng):
    """Test that identical samples have zero discrepancy."""
    x = rng.normal(size=(8, 5))
    assert cmd(Tensor(x), Tensor(x.copy())).item() == 0.0


def test_cmd_translation(rng):
    """Test that a translation only affects the first moment."""
    x = rng.normal(size=(16, 12))
    c = rng.normal(size=12)
    assert cmd(Tensor(x), Tensor(x + c)).item() == pytest.approx(
        np.linalg.norm(c), abs=1e-12
    )


def test_cmd_symmetric_and_positive(rng):
    """Test symmetry and positivity of `cmd`."""
    x1 = rng.normal(size=(10, 4))
    x2 = rng.normal(size=(10, 4)) + 1.0
    forward = cmd(Tensor(x1), Tensor(x2)).item()
    assert forward > 0
    assert forward == pytest.approx(
        cmd(Tensor(x2), Tensor(x1)).item(), abs=1e-12
    )


def test_cmd_first_order(rng):
    """Test that order 1 reduces to the distance of means."""
    x1 = rng.normal(size=(6, 3))
    x2 = rng.normal(size=(6, 3))
    assert cmd(Tensor(x1), Tensor(x2), 1).item() == pytest.approx(
        np.linalg.norm(x1.mean(axis=0) - x2.mean(axis=0)), abs=1e-12
    )


@pytest.mark.parametrize(
    ("x1", "x2", "order", "error"),
    [
        (np.zeros((1, 3)), np.zeros((1, 3)), 5, ValueError),
        (np.zeros((4, 3)), np.zeros((4, 3)), 0, ValueError),
        (np.zeros((4, 3)), np.zeros((4, 2)), 5, DimensionError),
        (np.zeros(3), np.zeros(3), 5, DimensionError),
    ],
    ids=["batch", "order", "width", "rank"],
)
def test_cmd_rejects(x1, x2, order, error):
    """Test invalid inputs to `cmd`."""
    with pytest.raises(error):
        cmd(Tensor(x1), Tensor(x2), order)


def test_cosine_distance():
    """Test the cosine distance on simple vectors."""
    x1 = Tensor([[1.0, 0.0], [1.0, 1.0]])
    x2 = Tensor([[0.0, 2.0], [3.0, 3.0]])
    assert cosine_distance(x1, x2).item() == pytest.approx(0.5, abs=1e-12)
    assert cosine_distance(x1, -x1).item() == pytest.approx(2.0, abs=1e-12)


def test_jsd():
    """Test the Jensen-Shannon divergence at its extremes."""
    x = Tensor([[0.0, 0.0], [1.0, 2.0]])
    assert jsd(x, x).item() == pytest.approx(0.0, abs=1e-12)
    far = jsd(Tensor([[100.0, 0.0]]), Tensor([[0.0, 100.0]])).item()
    assert far == pytest.approx(1.0, abs=1e-6)


def test_smooth_l1_distance():
    """Test the mean smooth-L1 distance."""
    assert smooth_l1_distance(
        Tensor([[0.0, 2.0]]), Tensor([[0.5, 0.0]])
    ).item() == pytest.approx((0.125 + 1.5) / 2)


@pytest.mark.parametrize(
    "metric", sorted(METRIC_OPTIONS), ids=sorted(METRIC_OPTIONS)
)
def test_metric_gradients(rng, metric):
    """Test metric gradients against finite differences."""
    x1 = Tensor(rng.normal(size=(4, 3)), requires_grad=True)
    x2 = Tensor(rng.normal(size=(4, 3)), requires_grad=True)
    distance = load_metric(metric, 3)
    results = check_gradients(lambda: distance(x1, x2), {"x1": x1, "x2": x2})
    assert max(r.max_rel_error for r in results) <= 1e-6


def test_load_metric():
    """Test the metric registry."""
    assert load_metric("jsd") is jsd
    x1 = Tensor(np.arange(6.0).reshape(3, 2))
    x2 = Tensor(np.arange(6.0).reshape(3, 2) ** 2)
    assert load_metric("cmd", 2)(x1, x2).item() == cmd(x1, x2, 2).item()
    with pytest.raises(ValueError) as exc_info:
        load_metric("kl")
    assert "cmd, cosine, jsd, smooth_l1" in str(exc_info.value)
