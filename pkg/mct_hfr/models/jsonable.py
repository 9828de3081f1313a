"""
Definition of the JSONable-type and associated utility functions
"""

from typing import Optional, TypeAlias
from collections.abc import MutableMapping

import numpy as np


JSONable: TypeAlias = Optional[
    str
    | int
    | float
    | bool
    | list["JSONable"]
    | MutableMapping[str, "JSONable"]
]
JSONObject: TypeAlias = MutableMapping[str, JSONable]


def to_jsonable(value) -> JSONable:
    """
    Returns `value` with numpy-scalars, numpy-arrays and tuples
    converted into their JSON-able counterparts.
    """
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, MutableMapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    return value

