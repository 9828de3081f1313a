"""Test module for the checkpoint container."""

import struct

import numpy as np
import pytest

from mct_hfr.errors import CheckpointMismatchError, FormatError
from mct_hfr.mct import (
    ModelConfig,
    init_params,
    encode_checkpoint,
    decode_checkpoint,
    save_checkpoint,
    load_checkpoint,
    data_signature,
    check_compatible,
)


def test_checkpoint_round_trip(temporary_directory, tiny_model_config):
    """Test writing and reading a checkpoint."""
    cfg = ModelConfig.from_json(tiny_model_config.json | {"dtype": "float32"})
    params = init_params(cfg, 5)
    path = save_checkpoint(temporary_directory / "tiny.mctp", cfg, params)
    restored_cfg, restored = load_checkpoint(path)
    assert restored_cfg == cfg
    assert list(restored) == list(params)
    for name, tensor in params.items():
        assert restored[name].dtype == np.float32
        assert (restored[name].values == tensor.values).all()
        assert restored[name].requires_grad
    assert encode_checkpoint(restored_cfg, restored) == path.read_bytes()


def test_checkpoint_layout(tiny_model_config):
    """Test the header of a checkpoint."""
    data = encode_checkpoint(
        tiny_model_config, init_params(tiny_model_config, 0)
    )
    assert data[:4] == b"MCTP"
    version, length = struct.unpack("<HI", data[4:10])
    assert version == 1
    assert b'"d":8' in data[10 : 10 + length]


def test_checkpoint_bad_magic(tiny_model_config):
    """Test rejection of an unknown magic."""
    data = encode_checkpoint(
        tiny_model_config, init_params(tiny_model_config, 0)
    )
    with pytest.raises(FormatError) as exc_info:
        decode_checkpoint(b"MMT1" + data[4:])
    assert exc_info.value.offset == 0


def test_checkpoint_truncated(tiny_model_config):
    """Test rejection of truncated data."""
    data = encode_checkpoint(
        tiny_model_config, init_params(tiny_model_config, 0)
    )
    with pytest.raises(FormatError):
        decode_checkpoint(data[:-3])
    with pytest.raises(FormatError):
        decode_checkpoint(data + b"\x00")


def test_checkpoint_wrong_parameters(tiny_model_config):
    """Test that parameters for a different layout are rejected."""
    other = ModelConfig.from_json(tiny_model_config.json | {"use_gfa": False})
    with pytest.raises(CheckpointMismatchError) as exc_info:
        encode_checkpoint(tiny_model_config, init_params(other, 0))
    assert "gfa.align.weight" in exc_info.value.expected
    assert "gfa.align.weight" not in exc_info.value.found


def test_data_signature():
    """Test the dataset-facing signature."""
    assert data_signature(4, (20, 16, 24)) == "classes=4;dims=20x16x24"


def test_check_compatible(tiny_model_config):
    """Test compatibility checks against dataset properties."""
    check_compatible(tiny_model_config, 3, (5, 4, 3))
    with pytest.raises(CheckpointMismatchError) as exc_info:
        check_compatible(tiny_model_config, 3, (5, 4, 2))
    assert exc_info.value.expected == "classes=3;dims=5x4x3"
    assert exc_info.value.found == "classes=3;dims=5x4x2"
