"""Test module for the "MMT1" dataset container."""

import struct

import pytest

from mct_hfr.errors import FormatError
from mct_hfr.datasim import (
    save_dataset,
    load_dataset,
    read_header,
    encode_dataset,
    decode_dataset,
)


def test_container_round_trip(
    temporary_directory, tiny_samples, tiny_gen_config
):
    """Test that save and load are bit-exact."""
    path = save_dataset(
        temporary_directory / "tiny.mmt", tiny_samples, tiny_gen_config.classes
    )
    loaded = load_dataset(path)
    assert len(loaded) == len(tiny_samples)
    for a, b in zip(tiny_samples, loaded):
        assert a.label == b.label
        for s, t in zip(a.sequences, b.sequences):
            assert s.shape == t.shape
            assert s.tobytes() == t.tobytes()
    header = read_header(path)
    assert header.classes == 3
    assert header.dims == (5, 4, 3)
    assert header.count == 12
    assert path.read_bytes() == encode_dataset(loaded, 3)


def test_container_layout(tiny_samples):
    """Test header layout and size accounting."""
    data = encode_dataset(tiny_samples[:1], 3)
    assert data[:4] == b"MMT1"
    assert struct.unpack_from("<H", data, 4) == (1,)
    assert struct.unpack_from("<IIIIQ", data, 6) == (3, 5, 4, 3, 1)
    sample = tiny_samples[0]
    assert len(data) == 30 + 4 + sum(
        4 + 4 * t * d for t, d in zip(sample.lengths, sample.dims)
    )


def test_container_bad_magic(tiny_samples):
    """Test corrupt magic."""
    data = bytearray(encode_dataset(tiny_samples, 3))
    data[0:4] = b"XXXX"
    with pytest.raises(FormatError) as exc_info:
        decode_dataset(bytes(data))
    assert exc_info.value.offset == 0


def test_container_bad_version(tiny_samples):
    """Test unsupported versions."""
    data = bytearray(encode_dataset(tiny_samples, 3))
    data[4:6] = struct.pack("<H", 7)
    with pytest.raises(FormatError) as exc_info:
        decode_dataset(bytes(data))
    assert exc_info.value.offset == 4


def test_container_truncated_mid_sample(tiny_samples):
    """Test that a truncated file names the affected sample."""
    full = encode_dataset(tiny_samples, 3)
    first_two = len(encode_dataset(tiny_samples[:2], 3))
    with pytest.raises(FormatError) as exc_info:
        decode_dataset(full[: first_two + 10])
    assert exc_info.value.sample_index == 2
    assert "sample 2" in str(exc_info.value)


def test_container_truncated_header():
    """Test that a truncated header is detected."""
    with pytest.raises(FormatError):
        decode_dataset(b"MMT1\x01")


def test_container_trailing_bytes(tiny_samples):
    """Test that trailing garbage is rejected."""
    with pytest.raises(FormatError):
        decode_dataset(encode_dataset(tiny_samples, 3) + b"\x00")


def test_container_bad_label(tiny_samples):
    """Test that labels outside of the class range are rejected."""
    with pytest.raises(ValueError):
        encode_dataset(tiny_samples, 2)
