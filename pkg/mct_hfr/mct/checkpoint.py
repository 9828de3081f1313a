"""
Binary checkpoint container "MCTP".

Layout (little-endian):
* magic `b"MCTP"`, version `u16`
* model configuration: `u32` byte length, then UTF-8 JSON with sorted
  keys
* parameter count `u32`; per parameter in canonical order: `u16` name
  length, UTF-8 name, `u8` rank, `rank x u32` extents and the row-major
  `float32` values
"""

from typing import Sequence
from pathlib import Path
import json
import struct

import numpy as np

from mct_hfr.errors import CheckpointMismatchError, FormatError
from mct_hfr.util import make_path
from mct_hfr.tensorlab import Tensor
from .config import ModelConfig
from .params import ParamStore, param_shapes, signature


MAGIC = b"MCTP"
VERSION = 1
_FLOAT = np.dtype("<f4")


def encode_checkpoint(cfg: ModelConfig, params: ParamStore) -> bytes:
    """Returns checkpoint bytes for `cfg` and `params`."""
    expected = signature(param_shapes(cfg))
    if params.signature() != expected:
        raise CheckpointMismatchError(expected, params.signature())
    config = json.dumps(
        cfg.json, sort_keys=True, separators=(",", ":")
    ).encode("utf-8")
    chunks = [
        MAGIC,
        struct.pack("<HI", VERSION, len(config)),
        config,
        struct.pack("<I", len(params)),
    ]
    for name, tensor in params.items():
        _name = name.encode("utf-8")
        chunks.append(struct.pack("<H", len(_name)) + _name)
        chunks.append(
            struct.pack(f"<B{tensor.ndim}I", tensor.ndim, *tensor.shape)
        )
        chunks.append(
            np.ascontiguousarray(tensor.values, dtype=_FLOAT).tobytes()
        )
    return b"".join(chunks)


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        if self.offset + size > len(self.data):
            raise FormatError(
                f"Truncated checkpoint while reading {what}", self.offset
            )
        chunk = self.data[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str, what: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def decode_checkpoint(data: bytes) -> tuple[ModelConfig, ParamStore]:
    """
    Returns configuration and parameters decoded from checkpoint bytes.

    Raises `FormatError` on malformed input and
    `CheckpointMismatchError` if the stored parameters do not match the
    layout of the stored configuration.
    """
    reader = _Reader(data)
    if reader.take(len(MAGIC), "magic") != MAGIC:
        raise FormatError("Bad magic (expected 'MCTP')", 0)
    (version,) = reader.unpack("<H", "version")
    if version != VERSION:
        raise FormatError(
            f"Unsupported checkpoint version {version} (expected {VERSION})",
            len(MAGIC),
        )
    (config_length,) = reader.unpack("<I", "configuration length")
    config_offset = reader.offset
    try:
        cfg = ModelConfig.from_json(
            json.loads(
                reader.take(config_length, "configuration").decode("utf-8")
            )
        )
    except (ValueError, TypeError) as exc_info:
        raise FormatError(
            f"Bad configuration block ({exc_info})", config_offset
        ) from exc_info
    (count,) = reader.unpack("<I", "parameter count")
    arrays = {}
    for _ in range(count):
        (name_length,) = reader.unpack("<H", "parameter name")
        name = reader.take(name_length, "parameter name").decode("utf-8")
        (ndim,) = reader.unpack("<B", f"rank of '{name}'")
        shape = reader.unpack(f"<{ndim}I", f"shape of '{name}'")
        size = int(np.prod(shape, dtype=np.int64))
        arrays[name] = np.frombuffer(
            reader.take(size * _FLOAT.itemsize, f"values of '{name}'"),
            dtype=_FLOAT,
        ).reshape(shape)
    if reader.offset != len(data):
        raise FormatError(
            f"Unexpected {len(data) - reader.offset} trailing byte(s)",
            reader.offset,
        )
    expected = signature(param_shapes(cfg))
    found = signature([(name, a.shape) for name, a in arrays.items()])
    if expected != found:
        raise CheckpointMismatchError(expected, found)
    return cfg, ParamStore(
        {
            name: Tensor(
                a, requires_grad=True, dtype=cfg.numpy_dtype, name=name
            )
            for name, a in arrays.items()
        }
    )


def save_checkpoint(
    path: str | Path, cfg: ModelConfig, params: ParamStore
) -> Path:
    """Writes a checkpoint to `path`."""
    _path = make_path(path)
    _path.parent.mkdir(parents=True, exist_ok=True)
    _path.write_bytes(encode_checkpoint(cfg, params))
    return _path


def load_checkpoint(path: str | Path) -> tuple[ModelConfig, ParamStore]:
    """Reads a checkpoint from `path`."""
    return decode_checkpoint(make_path(path).read_bytes())


def data_signature(classes: int, dims: Sequence[int]) -> str:
    """Returns the dataset-facing signature of a model."""
    return f"classes={classes};dims={'x'.join(map(str, dims))}"


def check_compatible(
    cfg: ModelConfig, classes: int, dims: Sequence[int]
) -> None:
    """
    Raises `CheckpointMismatchError` with both signatures if a dataset
    with `classes` and `dims` cannot be processed by a model for `cfg`.
    """
    expected = data_signature(cfg.classes, cfg.dims)
    found = data_signature(classes, dims)
    if expected != found:
        raise CheckpointMismatchError(expected, found)
