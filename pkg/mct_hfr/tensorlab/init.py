"""Seeded parameter initializers."""

import numpy as np

from .tensor import Tensor


def xavier_uniform(
    rng: np.random.Generator,
    shape: tuple[int, ...],
    fan_in: int,
    fan_out: int,
    dtype=np.float32,
    name=None,
) -> Tensor:
    """
    Returns a trainable tensor drawn uniformly from
    `[-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))]`.
    """
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return Tensor(
        rng.uniform(-limit, limit, size=shape),
        requires_grad=True,
        dtype=dtype,
        name=name,
    )


def zeros(shape: tuple[int, ...], dtype=np.float32, name=None) -> Tensor:
    """Returns a trainable all-zero tensor."""
    return Tensor(np.zeros(shape), requires_grad=True, dtype=dtype, name=name)


def ones(shape: tuple[int, ...], dtype=np.float32, name=None) -> Tensor:
    """Returns a trainable all-one tensor."""
    return Tensor(np.ones(shape), requires_grad=True, dtype=dtype, name=name)
