"""Test module for encoder, re-scaled attention and pooling."""

import numpy as np
import pytest

from mct_hfr.errors import DimensionError
from mct_hfr.util import MODALITIES
from mct_hfr.tensorlab import Tensor
from mct_hfr.mct import (
    ModelConfig,
    init_params,
    positional_encoding,
    unimodal_encode,
    rescale_factors,
    key_scales,
    mrau_forward,
    attention_pool,
    attend,
)


def _randomize(params, rng, scale=0.5):
    for t in params.values():
        t.values[...] = rng.normal(size=t.shape) * scale
    return params


def test_positional_encoding_first_row():
    """Test that position 0 encodes as alternating zeros and ones."""
    pe = positional_encoding(3, 8)
    assert (pe[0] == np.tile([0.0, 1.0], 4)).all()


def test_positional_encoding_range():
    """Test the value range of the position table."""
    pe = positional_encoding(400, 128)
    assert pe.shape == (400, 128)
    assert np.abs(pe).max() <= 1.0
    assert pe[5, 2] == pytest.approx(np.sin(5 / 10000 ** (2 / 128)))
    assert pe[5, 3] == pytest.approx(np.cos(5 / 10000 ** (2 / 128)))


def test_unimodal_encode_pointwise_kernel(tiny_model_config, rng):
    """Test encoding with a kernel of size one (language modality)."""
    params = init_params(tiny_model_config, 0)
    x = rng.normal(size=(2, 5, 3))
    h = unimodal_encode(Tensor(x), "l", params, tiny_model_config)
    weight = params["encoder.l.conv.weight"].values[0]
    assert h.shape == (2, 5, 8)
    np.testing.assert_allclose(
        h.values, x @ weight + positional_encoding(5, 8), atol=1e-12
    )


def test_unimodal_encode_padding(tiny_model_config, rng):
    """Test that padded steps are zero after encoding."""
    params = init_params(tiny_model_config, 0)
    x = rng.normal(size=(2, 6, 5))
    valid = np.arange(6)[None, :] < np.array([[6], [3]])
    h = unimodal_encode(Tensor(x), "a", params, tiny_model_config, valid)
    assert (h.values[1, 3:] == 0).all()
    assert (h.values[0] != 0).any(axis=-1).all()


def test_unimodal_encode_bad_dimension(tiny_model_config):
    """Test that a wrong feature dimension is rejected."""
    params = init_params(tiny_model_config, 0)
    with pytest.raises(DimensionError):
        unimodal_encode(
            Tensor(np.zeros((4, 2))), "a", params, tiny_model_config
        )


def test_rescale_factors_at_max_length():
    """Test factors at the maximum lengths."""
    gamma_b, gamma_e = rescale_factors((400, 40, 50), (400, 40, 50))
    assert gamma_e == 1.0
    np.testing.assert_allclose(gamma_b, 1 / np.sqrt([400, 40, 50]))


def test_rescale_factors_balance():
    """Test the balance factor for a length of four."""
    gamma_b, _ = rescale_factors((4, 40, 50), (400, 40, 50))
    assert gamma_b[0] == 0.5


def test_rescale_factors_extrapolation():
    """Test the extrapolation factor for shorter sequences."""
    _, gamma_e = rescale_factors((100, 10, 12), (400, 40, 50))
    assert gamma_e == pytest.approx(np.log(122) / np.log(490), abs=1e-12)
    assert gamma_e == pytest.approx(0.77564, abs=1e-3)


def test_rescale_factors_clamp():
    """Test that the length sum is clamped to two."""
    _, gamma_e = rescale_factors((1, 1, 1), (2, 2, 2))
    assert gamma_e == pytest.approx(np.log(3) / np.log(6))
    _, gamma_e = rescale_factors((1,), (4,))
    assert gamma_e == pytest.approx(np.log(2) / np.log(4))


@pytest.mark.parametrize(
    "lengths",
    [(0, 4, 5), (3, 0, 5), (3, 4, -1)],
    ids=["a", "v", "l"],
)
def test_rescale_factors_zero_length(lengths):
    """Test that empty modalities are rejected."""
    with pytest.raises(ValueError):
        rescale_factors(lengths, (6, 4, 5))


def test_rescale_factors_monotone():
    """Test monotonicity of both factors."""
    lengths = np.array([[t, 10, 12] for t in range(1, 400)])
    gamma_b, gamma_e = rescale_factors(lengths, (400, 40, 50))
    assert (np.diff(gamma_e) > 0).all()
    assert (np.diff(gamma_b[:, 0]) < 0).all()
    assert (gamma_b[:, 1:] == gamma_b[0, 1:]).all()


@pytest.mark.parametrize(
    ("use_gamma_b", "use_gamma_e"),
    [(True, True), (True, False), (False, True), (False, False)],
    ids=["both", "balance", "extrapolation", "none"],
)
def test_key_scales_switches(tiny_model_config, use_gamma_b, use_gamma_e):
    """Test the ablation switches of the key factors."""
    cfg = ModelConfig.from_json(
        tiny_model_config.json
        | {"use_gamma_b": use_gamma_b, "use_gamma_e": use_gamma_e}
    )
    lengths = [np.array([4, 6]), np.array([1, 4]), np.array([2, 5])]
    scales = key_scales(lengths, cfg)
    gamma_b, gamma_e = rescale_factors(np.stack(lengths, axis=-1), (6, 4, 5))
    expected = (gamma_b if use_gamma_b else 1.0) * (
        gamma_e[:, None] if use_gamma_e else 1.0
    )
    np.testing.assert_allclose(scales, np.broadcast_to(expected, (2, 3)))


def _mrau_inputs(cfg, rng, lengths):
    batch = len(lengths[0])
    extents = [int(max(length)) for length in lengths]
    valid = [
        np.arange(t)[None, :] < np.asarray(length)[:, None]
        for t, length in zip(extents, lengths)
    ]
    hs = [
        Tensor(rng.normal(size=(batch, t, cfg.d)) * v[..., None])
        for t, v in zip(extents, valid)
    ]
    return hs, [np.asarray(length) for length in lengths], valid


def test_mrau_forward_shapes_and_attention(tiny_model_config, rng):
    """Test output shapes and attention normalization of one layer."""
    params = _randomize(init_params(tiny_model_config, 0), rng)
    hs, lengths, valid = _mrau_inputs(
        tiny_model_config, rng, ([6, 2], [1, 4], [3, 5])
    )
    outputs, attention = mrau_forward(
        hs, lengths, valid, params, 0, tiny_model_config
    )
    key_valid = np.concatenate(valid, axis=1)
    for h, e, probs, v in zip(hs, outputs, attention, valid):
        assert e.shape == h.shape
        assert probs.shape == (2, 2, h.shape[1], key_valid.shape[1])
        np.testing.assert_allclose(probs.values.sum(axis=-1), 1.0, atol=1e-6)
        assert (probs.values * ~key_valid[:, None, None, :] == 0).all()
        assert (e.values[~v] == 0).all()


def test_mrau_forward_stackable(tiny_model_config, rng):
    """Test that layers can be stacked."""
    cfg = ModelConfig.from_json(tiny_model_config.json | {"layers": 3})
    params = init_params(cfg, 0)
    hs, lengths, valid = _mrau_inputs(cfg, rng, ([5], [2], [4]))
    for layer in range(cfg.layers):
        hs, _ = mrau_forward(hs, lengths, valid, params, layer, cfg)
    assert [h.shape for h in hs] == [(1, 5, 8), (1, 2, 8), (1, 4, 8)]


def test_mrau_forward_shape_mismatch(tiny_model_config, rng):
    """Test that malformed inputs are rejected."""
    params = init_params(tiny_model_config, 0)
    hs, lengths, valid = _mrau_inputs(tiny_model_config, rng, ([5], [2], [4]))
    with pytest.raises(DimensionError):
        mrau_forward(hs[:2], lengths, valid, params, 0, tiny_model_config)
    with pytest.raises(DimensionError):
        mrau_forward(
            [hs[0], hs[1], Tensor(np.zeros((1, 4, 3)))],
            lengths,
            valid,
            params,
            0,
            tiny_model_config,
        )


def _layer_norm(x, gain, bias, eps):
    mean = x.mean(axis=-1, keepdims=True)
    var = ((x - mean) ** 2).mean(axis=-1, keepdims=True)
    return (x - mean) / np.sqrt(var + eps) * gain + bias


def _softmax(x):
    e = np.exp(x - x.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def test_mrau_forward_reference(tiny_model_config, rng):
    """
    Test a single-head layer without key factors against a direct
    implementation of cross-attention from the concatenated sequence.
    """
    cfg = ModelConfig.from_json(
        tiny_model_config.json
        | {"heads": 1, "d_k": 8, "use_gamma_b": False, "use_gamma_e": False}
    )
    params = _randomize(init_params(cfg, 0), rng)
    hs, lengths, valid = _mrau_inputs(cfg, rng, ([6], [4], [5]))
    outputs, _ = mrau_forward(hs, lengths, valid, params, 0, cfg)

    def p(name):
        return params[name].values

    x = [h.values[0] for h in hs]
    keys = np.concatenate(
        [xi @ p(f"mrau.0.{m}.wk") for xi, m in zip(x, MODALITIES)]
    )
    values = np.concatenate(
        [xi @ p(f"mrau.0.{m}.wv") for xi, m in zip(x, MODALITIES)]
    )
    for xi, m, e in zip(x, MODALITIES, outputs):
        prefix = f"mrau.0.{m}"
        probs = _softmax((xi @ p(f"{prefix}.wq")) @ keys.T / np.sqrt(8))
        h1 = _layer_norm(
            probs @ values @ p(f"{prefix}.wo") + xi,
            p(f"{prefix}.ln1.gain"),
            p(f"{prefix}.ln1.bias"),
            cfg.ln_eps,
        )
        hidden = np.maximum(
            h1 @ p(f"{prefix}.ffn1.weight") + p(f"{prefix}.ffn1.bias"), 0
        )
        expected = _layer_norm(
            hidden @ p(f"{prefix}.ffn2.weight")
            + p(f"{prefix}.ffn2.bias")
            + h1,
            p(f"{prefix}.ln2.gain"),
            p(f"{prefix}.ln2.bias"),
            cfg.ln_eps,
        )
        np.testing.assert_allclose(e.values[0], expected, atol=1e-10)


def test_attend_bad_heads(rng):
    """Test that a width not divisible by the head count is rejected."""
    x = Tensor(rng.normal(size=(1, 2, 6)))
    with pytest.raises(DimensionError):
        attend(x, x, x, np.ones((1, 2), dtype=bool), 4)


def test_attention_pool_single_step(rng):
    """Test pooling over a single step."""
    e = Tensor(rng.normal(size=(2, 1, 4)))
    h = attention_pool(
        e, np.ones((2, 1), dtype=bool), Tensor(rng.normal(size=4))
    )
    np.testing.assert_allclose(h.values, e.values[:, 0], atol=1e-15)


def test_attention_pool_zero_query(rng):
    """Test that a zero query averages the non-padding steps."""
    e = rng.normal(size=(2, 5, 4))
    valid = np.arange(5)[None, :] < np.array([[5], [2]])
    h = attention_pool(Tensor(e), valid, Tensor(np.zeros(4)))
    np.testing.assert_allclose(h.values[0], e[0].mean(axis=0), atol=1e-12)
    np.testing.assert_allclose(h.values[1], e[1, :2].mean(axis=0), atol=1e-12)


def test_attention_pool_reference(rng):
    """Test pooling against an explicit weighted sum."""
    e = rng.normal(size=(3, 6, 4))
    w = rng.normal(size=4)
    lengths = [6, 1, 4]
    valid = np.arange(6)[None, :] < np.array(lengths)[:, None]
    h = attention_pool(Tensor(e), valid, Tensor(w))
    for b, length in enumerate(lengths):
        scores = [float(e[b, t] @ w) / 2.0 for t in range(length)]
        weights = np.exp(np.array(scores) - max(scores))
        weights /= weights.sum()
        expected = sum(weights[t] * e[b, t] for t in range(length))
        np.testing.assert_allclose(h.values[b], expected, atol=1e-10)
