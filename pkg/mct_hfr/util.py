"""Module providing helper functions for the mct-hfr package."""

from typing import Iterable, Optional
from pathlib import Path
import json
from datetime import datetime, timezone

import numpy as np


MODALITIES = ("a", "v", "l")
"""Modality identifiers (audio, vision, language) in canonical order."""


# named stream identifiers for `get_rng`; fixed integers keep derived
# streams stable across versions
STREAM_PROTOTYPE = 1
STREAM_SAMPLE = 2
STREAM_MASK = 3
STREAM_INIT = 4
STREAM_SHUFFLE = 5
STREAM_SPLIT = 6
STREAM_LABEL = 7
STREAM_EXTRAPOLATION = 8
STREAM_TRAIN_MASK = 9
STREAM_VALIDATION_MASK = 10


def get_rng(seed: int, *keys: int) -> np.random.Generator:
    """
    Returns a `numpy.random.Generator` for the stream identified by
    `seed` and `keys`.

    Independent streams are derived via `numpy.random.SeedSequence`
    so that, e.g., every sample of a dataset can be generated from its
    own `(seed, index)`-stream.

    Keyword arguments:
    seed -- base seed
    keys -- additional non-negative integers identifying the stream
    """
    return np.random.default_rng(
        np.random.SeedSequence([int(seed), *map(int, keys)])
    )


def make_path(path: str | Path) -> Path:
    """
    A convenience-function returning a `Path`-object created from path.

    Keyword arguments:
    path -- filesystem path either as str or Path
    """

    if isinstance(path, str):
        return Path(path)
    return path


def now() -> datetime:
    """Returns the current UTC-datetime (whole seconds)."""
    return datetime.now(tz=timezone.utc).replace(microsecond=0)


def write_json(path: str | Path, json_: dict, mkdir: bool = True) -> Path:
    """
    Writes `json_` to `path` in a canonical (sorted, indented) form so
    that identical content results in identical bytes.

    Keyword arguments:
    path -- output file
    json_ -- JSON-able document
    mkdir -- create parent directories on the fly
             (default True)
    """
    _path = make_path(path)
    if mkdir:
        _path.parent.mkdir(parents=True, exist_ok=True)
    _path.write_text(
        json.dumps(json_, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return _path


def qjoin(
    values: Iterable[str],
    separator: Optional[str] = None,
    quote: Optional[str] = None,
) -> str:
    """
    Joins values from `values` surrounded by `quote` using `separator`.

    Keyword arguments:
    values -- values
    separator -- value-separator
                 (default None; uses ,)
    quote -- quotation-symbol
             (default None; uses ')
    """

    _quote = "'" if quote is None else quote
    return (", " if separator is None else separator).join(
        map(lambda x: f"{_quote}{x}{_quote}", values)
    )
