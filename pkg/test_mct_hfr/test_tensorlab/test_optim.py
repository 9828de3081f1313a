"""Test module for `adamw_step`."""

import numpy as np
import pytest

from mct_hfr.errors import NonFiniteError
from mct_hfr.tensorlab import Tensor, OptimState, AdamW, adamw_step


def test_adamw_null_update():
    """Test zero gradient without weight decay."""
    p = Tensor(np.array([1.0, -2.0]), requires_grad=True)
    state = adamw_step(
        {"p": p}, {"p": np.zeros(2)}, OptimState(weight_decay=0.0)
    )
    assert p.values.tolist() == [1.0, -2.0]
    assert state.step_count == 1


def test_adamw_decay_only():
    """Test zero gradient with weight decay only."""
    p = Tensor(np.array([1.0, -2.0]), requires_grad=True)
    adamw_step(
        {"p": p}, {"p": np.zeros(2)}, OptimState(lr=1e-4, weight_decay=0.01)
    )
    np.testing.assert_allclose(
        p.values, [0.999999, -1.999998], rtol=0, atol=1e-15
    )


def test_adamw_single_step_closed_form():
    """Test the first step on a scalar against the closed form."""
    lr, eps, b1, b2 = 1e-4, 1e-8, 0.9, 0.999
    p = Tensor(np.array([0.5]), requires_grad=True)
    adamw_step(
        {"p": p},
        {"p": np.array([1.0])},
        OptimState(lr=lr, weight_decay=0.0),
    )
    m_hat = (1 - b1) * 1.0 / (1 - b1)
    v_hat = (1 - b2) * 1.0 / (1 - b2)
    expected = 0.5 - lr * m_hat / (np.sqrt(v_hat) + eps)
    assert p.values[0] == pytest.approx(expected, abs=1e-12)


def test_adamw_two_steps_hand_rolled(rng):
    """Test two steps against a hand-rolled reference with decay."""
    lr, wd, b1, b2, eps = 1e-3, 0.01, 0.9, 0.999, 1e-8
    values = rng.normal(size=(2, 3))
    grads = [rng.normal(size=(2, 3)) for _ in range(2)]
    p = Tensor(values.copy(), requires_grad=True)
    state = OptimState(lr=lr, weight_decay=wd)
    ref, m, v = values.copy(), np.zeros((2, 3)), np.zeros((2, 3))
    for t, g in enumerate(grads, start=1):
        adamw_step({"p": p}, {"p": g}, state)
        ref = ref * (1 - lr * wd)
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        ref = ref - lr * (m / (1 - b1**t)) / (np.sqrt(v / (1 - b2**t)) + eps)
    np.testing.assert_allclose(p.values, ref, rtol=0, atol=1e-12)
    assert state.first_moment["p"].shape == (2, 3)


def test_adamw_non_finite_gradient():
    """Test that a non-finite gradient names the parameter."""
    p = Tensor(np.ones(2), requires_grad=True)
    q = Tensor(np.ones(2), requires_grad=True)
    with pytest.raises(NonFiniteError) as exc_info:
        adamw_step(
            {"p": p, "q": q},
            {"p": np.zeros(2), "q": np.array([np.nan, 0.0])},
            OptimState(),
        )
    assert "'q'" in str(exc_info.value)
    assert p.values.tolist() == [1.0, 1.0]


def test_adamw_wrapper_uses_gradient_buffers():
    """Test `AdamW.step` reads gradient buffers."""
    p = Tensor(np.array([3.0]), requires_grad=True)
    optimizer = AdamW({"p": p}, lr=0.1, weight_decay=0.0)
    (p * p).sum().backward()
    optimizer.step()
    optimizer.zero_grad()
    assert p.grad is None
    assert p.values[0] == pytest.approx(2.9, abs=1e-6)


def test_optim_state_validation():
    """Test rejection of invalid settings."""
    with pytest.raises(ValueError):
        OptimState(beta1=1.0)
    with pytest.raises(ValueError):
        OptimState(lr=-1)
