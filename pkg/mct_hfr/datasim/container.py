"""
Binary dataset container "MMT1".

Layout (little-endian):
* header: magic `b"MMT1"`, version `u16`, class count `u32`,
  feature dimensions `3 x u32`, sample count `u64`
* per sample: label `u32`, then per modality the length `T` as `u32`
  followed by `T * d_m` row-major `float32` values
"""

from typing import Optional, Sequence
from dataclasses import dataclass
from pathlib import Path
import struct

import numpy as np

from mct_hfr.errors import FormatError
from mct_hfr.util import MODALITIES, make_path
from .sample import MultimodalSample


MAGIC = b"MMT1"
VERSION = 1
_HEADER = struct.Struct("<4sHIIIIQ")
_U32 = struct.Struct("<I")
_FLOAT = np.dtype("<f4")


@dataclass(frozen=True)
class ContainerHeader:
    """
    Container metadata.

    Keyword arguments:
    version -- format version
    classes -- class count C
    dims -- per-modality feature dimensions
    count -- number of samples
    """

    version: int
    classes: int
    dims: tuple[int, int, int]
    count: int


def encode_dataset(
    samples: Sequence[MultimodalSample],
    classes: int,
    dims: Optional[Sequence[int]] = None,
) -> bytes:
    """
    Returns the container bytes for `samples`.

    Keyword arguments:
    samples -- samples to encode
    classes -- class count C
    dims -- per-modality feature dimensions
            (default None; taken from the first sample)
    """
    if dims is None:
        if not samples:
            raise ValueError("Feature dimensions needed for empty datasets.")
        dims = samples[0].dims
    chunks = [_HEADER.pack(MAGIC, VERSION, classes, *dims, len(samples))]
    for sample in samples:
        if not 0 <= sample.label < classes:
            raise ValueError(
                f"Label {sample.label} of sample {sample.index} outside of "
                + f"[0, {classes})."
            )
        if tuple(sample.dims) != tuple(dims):
            raise ValueError(
                f"Sample {sample.index} has dimensions {sample.dims} "
                + f"(expected {tuple(dims)})."
            )
        chunks.append(_U32.pack(sample.label))
        for seq in sample.sequences:
            chunks.append(_U32.pack(seq.shape[0]))
            chunks.append(np.ascontiguousarray(seq, dtype=_FLOAT).tobytes())
    return b"".join(chunks)


def _decode_header(data: bytes) -> ContainerHeader:
    if len(data) < len(MAGIC) or data[: len(MAGIC)] != MAGIC:
        raise FormatError("Bad magic (expected 'MMT1')", 0)
    if len(data) < _HEADER.size:
        raise FormatError("Truncated header", len(data))
    _, version, classes, *dims, count = _HEADER.unpack_from(data, 0)
    if version != VERSION:
        raise FormatError(
            f"Unsupported format version {version} (expected {VERSION})",
            len(MAGIC),
        )
    return ContainerHeader(version, classes, tuple(dims), count)


def decode_dataset(
    data: bytes,
) -> tuple[ContainerHeader, list[MultimodalSample]]:
    """
    Returns header and samples decoded from container bytes; raises
    `FormatError` with byte offset (and sample index) on problems.
    """
    header = _decode_header(data)
    offset = _HEADER.size
    samples = []
    for index in range(header.count):
        if offset + _U32.size > len(data):
            raise FormatError("Truncated file", offset, index)
        (label,) = _U32.unpack_from(data, offset)
        if label >= header.classes:
            raise FormatError(
                f"Label {label} outside of [0, {header.classes})",
                offset,
                index,
            )
        offset += _U32.size
        sequences = []
        for m, dim in enumerate(header.dims):
            if offset + _U32.size > len(data):
                raise FormatError("Truncated file", offset, index)
            (length,) = _U32.unpack_from(data, offset)
            if length == 0:
                raise FormatError(
                    f"Empty sequence in modality '{MODALITIES[m]}'",
                    offset,
                    index,
                )
            offset += _U32.size
            nbytes = length * dim * _FLOAT.itemsize
            if offset + nbytes > len(data):
                raise FormatError("Truncated file", offset, index)
            sequences.append(
                np.frombuffer(
                    data, dtype=_FLOAT, count=length * dim, offset=offset
                )
                .reshape(length, dim)
                .astype(np.float32)
            )
            offset += nbytes
        samples.append(
            MultimodalSample(
                sequences=tuple(sequences), label=label, index=index
            )
        )
    if offset != len(data):
        raise FormatError(
            f"Unexpected {len(data) - offset} trailing byte(s)", offset
        )
    return header, samples


def save_dataset(
    path: str | Path,
    samples: Sequence[MultimodalSample],
    classes: int,
    dims: Optional[Sequence[int]] = None,
) -> Path:
    """Writes `samples` to `path` (see `encode_dataset`)."""
    _path = make_path(path)
    _path.write_bytes(encode_dataset(samples, classes, dims))
    return _path


def load_dataset(path: str | Path) -> list[MultimodalSample]:
    """Reads the samples stored at `path`."""
    return decode_dataset(make_path(path).read_bytes())[1]


def read_header(path: str | Path) -> ContainerHeader:
    """Reads only the container header stored at `path`."""
    with open(make_path(path), "rb") as file:
        return _decode_header(file.read(_HEADER.size))
