"""Test module for the finite-difference checker."""

from mct_hfr.tensorlab import Tensor, check_gradients


def test_check_gradients_quadratic(rng):
    """Test `check_gradients` on the probe loss `|theta|^2`."""
    theta = Tensor(rng.normal(size=3), requires_grad=True)
    results = check_gradients(lambda: (theta * theta).sum(), {"theta": theta})
    assert results[0].max_rel_error <= 1e-10
    assert results[0].probes == 3
    assert theta.grad is None


def test_check_gradients_restores_values(rng):
    """Test that parameters are restored after probing."""
    values = rng.normal(size=5)
    theta = Tensor(values.copy(), requires_grad=True)
    check_gradients(lambda: (theta**3).sum(), {"theta": theta})
    assert (theta.values == values).all()


def test_check_gradients_fault_injection(rng):
    """Test that a scaled analytic gradient is flagged."""
    a = Tensor(rng.normal(size=3), requires_grad=True)
    b = Tensor(rng.normal(size=3), requires_grad=True)
    results = check_gradients(
        lambda: (a * b).sum() + (a * a).sum(),
        {"a": a, "b": b},
        analytic_hook=lambda name, g: g * 1.01 if name == "b" else g,
    )
    errors = {r.name: r.max_rel_error for r in results}
    assert errors["a"] <= 1e-8
    assert errors["b"] > 1e-3


def test_check_gradients_probes(rng):
    """Test subsampling of probed entries."""
    theta = Tensor(rng.normal(size=100), requires_grad=True)
    results = check_gradients(
        lambda: (theta * theta).sum(), {"theta": theta}, probes=7
    )
    assert results[0].probes == 7
