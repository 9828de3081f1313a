"""Learned-query attention pooling."""

import numpy as np

from mct_hfr.tensorlab import Tensor, softmax_rows


def attention_pool(e: Tensor, valid: np.ndarray, query: Tensor) -> Tensor:
    """
    Collapses `(B, T, d)` features into `(B, d)` with weights
    `softmax_t(E[t] . w / sqrt(d))` over non-padding steps.
    """
    batch, length, d = e.shape
    scores = (e @ query.reshape(d, 1)).reshape(batch, length) * (
        1.0 / np.sqrt(d)
    )
    alpha = softmax_rows(scores, valid)
    return (alpha.reshape(batch, 1, length) @ e).reshape(batch, d)
