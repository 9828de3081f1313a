"""
Forward pass of the modality-collaborative transformer: encoding,
stacked re-scaled attention, pooling and classification.
"""

from dataclasses import dataclass, field

import numpy as np

from mct_hfr.util import MODALITIES
from mct_hfr.datasim import Batch
from mct_hfr.tensorlab import Tensor, concat, softmax_rows, neg_log_pick
from .config import ModelConfig
from .encoder import unimodal_encode
from .mrau import mrau_forward
from .pooling import attention_pool


PROBABILITY_FLOOR = 1e-12


@dataclass
class ForwardTrace:
    """
    Intermediate results of one forward pass.

    Keyword arguments:
    encoded -- per-modality encoder outputs H_m `(B, T_m, d)`
    reinforced -- per-modality final-layer features E_m `(B, T_m, d)`
    pooled -- per-modality pooled vectors h_m `(B, d)`
    fused -- concatenation h of the pooled vectors `(B, 3d)`
    logits -- classifier outputs `(B, C)`
    probs -- class probabilities `(B, C)`
    attention -- per-layer lists of per-modality attention
                 probabilities
    """

    encoded: list[Tensor]
    reinforced: list[Tensor]
    pooled: list[Tensor]
    fused: Tensor
    logits: Tensor
    probs: Tensor
    attention: list[list[Tensor]] = field(default_factory=list)

    def predictions(self) -> np.ndarray:
        """Returns the arg-max class per sample."""
        return self.probs.values.argmax(axis=-1)


def classify(h: Tensor, params, cfg: ModelConfig) -> tuple[Tensor, Tensor]:
    """
    Maps fused vectors `(B, 3d)` to logits and probabilities using the
    classifier layers (ReLU between layers).
    """
    x = h
    for j in range(cfg.classifier_layers):
        if j > 0:
            x = x.relu()
        x = (
            x @ params[f"classifier.{j}.weight"]
            + params[f"classifier.{j}.bias"]
        )
    return x, softmax_rows(x)


def ce_loss(probs: Tensor, labels: np.ndarray) -> Tensor:
    """
    Returns the batch mean of `-log(max(p[label], 1e-12))`.
    """
    return neg_log_pick(probs, labels, PROBABILITY_FLOOR).mean()


def mct_forward(
    batch: Batch,
    params,
    cfg: ModelConfig,
    complete: bool = False,
) -> ForwardTrace:
    """
    Runs the classifier branch on `batch`.

    Keyword arguments:
    batch -- collated batch
    params -- parameter mapping
    cfg -- model configuration
    complete -- if `True`, use the complete (unmasked) values
                (default False)
    """
    dtype = cfg.numpy_dtype
    values = batch.complete if complete else batch.values
    valid = batch.valid
    hs = [
        unimodal_encode(Tensor(x, dtype=dtype), m, params, cfg, v)
        for x, m, v in zip(values, MODALITIES, valid)
    ]
    encoded = hs
    attention = []
    for layer in range(cfg.layers):
        hs, probs = mrau_forward(hs, batch.lengths, valid, params, layer, cfg)
        attention.append(probs)
    pooled = [
        attention_pool(e, v, params[f"pool.{m}.query"])
        for e, v, m in zip(hs, valid, MODALITIES)
    ]
    fused = concat(pooled, axis=-1)
    logits, probs = classify(fused, params, cfg)
    return ForwardTrace(
        encoded=encoded,
        reinforced=hs,
        pooled=pooled,
        fused=fused,
        logits=logits,
        probs=probs,
        attention=attention,
    )
