"""
Test module for decoders, reconstruction losses and the joint forward
pass.
"""

import numpy as np
import pytest

from mct_hfr.errors import DimensionError
from mct_hfr.datasim import collate, mask_batch
from mct_hfr.tensorlab import Tensor, check_gradients
from mct_hfr.mct import ModelConfig, init_params, mct_forward, ce_loss
from mct_hfr.hfr import (
    lfi_decode,
    lfi_loss,
    gfa_loss,
    hfr_forward,
    cmd,
    load_metric,
)


@pytest.fixture(name="tiny_batch")
def _tiny_batch(tiny_model_config, tiny_samples):
    """Return a batch of four complete samples."""
    return collate(tiny_samples[:4], tiny_model_config.max_lengths)


@pytest.fixture(name="masked_batch")
def _masked_batch(tiny_batch):
    """Return the batch with half of the steps ablated."""
    return mask_batch(tiny_batch, 0.5, np.random.default_rng(3))


def test_lfi_decode(tiny_model_config, tiny_batch, rng):
    """Test shapes and attention of a decoder."""
    params = init_params(tiny_model_config, 0)
    valid = tiny_batch.valid[0]
    e = Tensor(rng.normal(size=valid.shape + (8,)) * valid[..., None])
    d, cross = lfi_decode(
        e, Tensor(tiny_batch.values[0], dtype=np.float64), valid, params, "a",
        tiny_model_config,
    )
    assert d.shape == tiny_batch.complete[0].shape
    assert (d.values[~valid] == 0).all()
    assert len(cross) == 1
    np.testing.assert_allclose(cross[0].values.sum(axis=-1), 1.0, atol=1e-6)
    assert (cross[0].values * ~valid[:, None, None, :] == 0).all()


def test_lfi_decode_blocks(tiny_model_config, tiny_batch, rng):
    """Test a decoder with two block pairs."""
    cfg = ModelConfig.from_json(tiny_model_config.json | {"decoder_blocks": 2})
    params = init_params(cfg, 0)
    valid = tiny_batch.valid[2]
    _, cross = lfi_decode(
        Tensor(rng.normal(size=valid.shape + (8,))),
        Tensor(tiny_batch.values[2], dtype=np.float64),
        valid,
        params,
        "l",
        cfg,
    )
    assert len(cross) == 2


def test_lfi_decode_shape_mismatch(tiny_model_config, tiny_batch):
    """Test that a wrong input width is rejected."""
    params = init_params(tiny_model_config, 0)
    valid = tiny_batch.valid[1]
    with pytest.raises(DimensionError):
        lfi_decode(
            Tensor(np.zeros(valid.shape + (8,))),
            Tensor(tiny_batch.values[1]),
            valid,
            params,
            "a",
            tiny_model_config,
        )


def test_lfi_loss_without_masks(rng):
    """Test that nothing ablated means zero loss."""
    targets = [rng.normal(size=(2, 3, 2)), rng.normal(size=(2, 4, 1))]
    decoded = [Tensor(rng.normal(size=t.shape)) for t in targets]
    masks = [np.zeros(t.shape[:2], dtype=np.uint8) for t in targets]
    assert lfi_loss(targets, decoded, masks).item() == 0.0


def test_lfi_loss_perfect_reconstruction(rng):
    """Test that a perfect reconstruction has zero loss."""
    targets = [rng.normal(size=(2, 3, 2))]
    masks = [rng.integers(0, 2, size=(2, 3))]
    assert lfi_loss(targets, [Tensor(targets[0].copy())], masks).item() == 0.0


def test_lfi_loss_single_element():
    """Test normalization by the number of ablated entries."""
    targets = [np.zeros((1, 2, 1)), np.zeros((1, 1, 1))]
    decoded = [Tensor([[[2.0], [7.0]]]), Tensor([[[3.0]]])]
    masks = [np.array([[1, 0]]), np.array([[0]])]
    assert lfi_loss(targets, decoded, masks).item() == 1.5


def test_lfi_loss_ignores_unmasked_entries(rng):
    """Test invariance to reconstructions at unablated steps."""
    targets = [rng.normal(size=(3, 5, 2))]
    masks = [rng.integers(0, 2, size=(3, 5))]
    decoded = rng.normal(size=(3, 5, 2))
    noise = rng.normal(size=(3, 5, 2))
    perturbed = decoded + (1 - masks[0])[..., None] * noise
    assert lfi_loss(targets, [Tensor(decoded)], masks).item() == pytest.approx(
        lfi_loss(targets, [Tensor(perturbed)], masks).item(), abs=1e-12
    )


def test_lfi_loss_rejects():
    """Test invalid inputs to `lfi_loss`."""
    with pytest.raises(ValueError):
        lfi_loss([np.zeros((1, 2, 1))], [], [np.zeros((1, 2))])
    with pytest.raises(DimensionError):
        lfi_loss(
            [np.zeros((1, 2, 1))],
            [Tensor(np.zeros((1, 3, 1)))],
            [np.zeros((1, 2))],
        )


def _identity_alignment(params):
    params["gfa.align.weight"].values[...] = np.eye(
        params["gfa.align.weight"].shape[0]
    )
    params["gfa.align.bias"].values[...] = 0
    return params


def test_gfa_loss_identity_alignment(tiny_model_config, tiny_batch):
    """Test alignment of identical views through an identity map."""
    params = _identity_alignment(init_params(tiny_model_config, 0))
    trace = mct_forward(tiny_batch, params, tiny_model_config)
    loss, distance = gfa_loss(
        trace.fused,
        trace.fused,
        trace.probs,
        tiny_batch.labels,
        params,
        load_metric("cmd"),
    )
    assert distance.item() == 0.0
    assert loss.item() == ce_loss(trace.probs, tiny_batch.labels).item()


@pytest.mark.parametrize("metric", ["cmd", "cosine", "jsd", "smooth_l1"])
def test_gfa_loss_uniform_probabilities(rng, metric):
    """Test the classification term for uniform probabilities."""
    params = {
        "gfa.align.weight": Tensor(rng.normal(size=(6, 6))),
        "gfa.align.bias": Tensor(rng.normal(size=6)),
    }
    h = Tensor(rng.normal(size=(3, 6)))
    h_complete = Tensor(rng.normal(size=(3, 6)))
    loss, distance = gfa_loss(
        h,
        h_complete,
        Tensor(np.full((3, 4), 0.25)),
        np.array([0, 1, 3]),
        params,
        load_metric(metric),
    )
    assert loss.item() - distance.item() == pytest.approx(np.log(4), abs=1e-12)


def test_gfa_loss_distance_term(rng):
    """Test that the distance term is the standalone discrepancy."""
    weight, bias = rng.normal(size=(6, 6)), rng.normal(size=6)
    params = {
        "gfa.align.weight": Tensor(weight),
        "gfa.align.bias": Tensor(bias),
    }
    h = rng.normal(size=(5, 6))
    h_complete = rng.normal(size=(5, 6))
    _, distance = gfa_loss(
        Tensor(h),
        Tensor(h_complete),
        Tensor(np.full((5, 2), 0.5)),
        np.zeros(5, dtype=int),
        params,
        load_metric("cmd"),
    )
    assert distance.item() == pytest.approx(
        cmd(Tensor(h @ weight + bias), Tensor(h_complete)).item(), abs=1e-12
    )


def test_hfr_forward_without_masking(tiny_model_config, tiny_batch):
    """Test the degenerate case without ablations."""
    params = init_params(tiny_model_config, 0)
    trace = hfr_forward(tiny_batch, params, tiny_model_config)
    assert trace.lfi.item() == 0.0
    np.testing.assert_allclose(
        trace.masked.fused.values, trace.complete.fused.values, atol=1e-6
    )
    assert trace.gfa.item() >= trace.distance.item() >= 0


def test_hfr_forward_trace(tiny_model_config, masked_batch):
    """Test shapes of the joint trace."""
    params = init_params(tiny_model_config, 0)
    trace = hfr_forward(masked_batch, params, tiny_model_config)
    assert [d.shape for d in trace.decoded] == [
        c.shape for c in masked_batch.complete
    ]
    assert trace.complete.probs.shape == trace.masked.probs.shape == (4, 3)
    assert trace.lfi.item() > 0
    assert trace.gfa.item() > 0
    assert len(trace.cross_attention) == 3


@pytest.mark.parametrize(
    ("kwargs", "lfi", "gfa"),
    [
        ({"use_lfi": False}, False, True),
        ({"use_gfa": False}, True, False),
        ({"hfr": False}, False, False),
    ],
    ids=["gfa-only", "lfi-only", "mct"],
)
def test_hfr_forward_ablations(
    tiny_model_config, masked_batch, kwargs, lfi, gfa
):
    """Test that disabled components are skipped."""
    cfg = ModelConfig.from_json(tiny_model_config.json | kwargs)
    trace = hfr_forward(masked_batch, init_params(cfg, 0), cfg)
    assert (trace.lfi is not None) == lfi
    assert (trace.gfa is not None) == gfa
    assert (trace.complete is not None) == gfa
    assert (len(trace.decoded) > 0) == lfi


@pytest.mark.parametrize(
    ("metric", "gfa"),
    [("cmd", False), ("cosine", True), ("smooth_l1", True)],
    ids=["cmd", "cosine", "smooth-l1"],
)
def test_hfr_forward_single_sample(
    tiny_model_config, tiny_samples, metric, gfa
):
    """Test that moment-based alignment is left out for one sample."""
    cfg = ModelConfig.from_json(
        tiny_model_config.json | {"gfa_metric": metric}
    )
    batch = mask_batch(
        collate(tiny_samples[:1], cfg.max_lengths),
        0.5,
        np.random.default_rng(3),
    )
    trace = hfr_forward(batch, init_params(cfg, 0), cfg)
    assert (trace.gfa is not None) == gfa
    assert (trace.complete is not None) == gfa
    assert trace.lfi is not None
    assert trace.masked.probs.shape == (1, 3)


@pytest.mark.parametrize("metric", ["cmd", "cosine", "jsd"])
def test_hfr_forward_gradients(tiny_model_config, masked_batch, metric):
    """Test gradients of the combined objective against finite differences."""
    cfg = ModelConfig.from_json(
        tiny_model_config.json | {"gfa_metric": metric}
    )
    params = init_params(cfg, 1)

    def loss():
        trace = hfr_forward(masked_batch, params, cfg)
        return (
            ce_loss(trace.masked.probs, masked_batch.labels)
            + trace.gfa * 0.4
            + trace.lfi * 0.6
        )

    results = check_gradients(loss, params, probes=3)
    worst = max(results, key=lambda r: r.max_rel_error)
    assert worst.max_rel_error <= 1e-4, worst.name
