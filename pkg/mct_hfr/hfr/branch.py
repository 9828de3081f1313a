"""Forward pass of the classifier together with the reconstruction branch."""

from typing import Optional
from dataclasses import dataclass, field

from mct_hfr.util import MODALITIES
from mct_hfr.datasim import Batch
from mct_hfr.tensorlab import Tensor
from mct_hfr.mct import ModelConfig, ForwardTrace, mct_forward
from .decoder import lfi_decode
from .losses import lfi_loss, gfa_loss
from .metrics import MOMENT_METRICS, load_metric


@dataclass
class ReconTrace:
    """
    Results of a joint forward pass.

    Keyword arguments:
    masked -- trace of the (possibly) masked view
    complete -- trace of the complete view (`None` without alignment)
    decoded -- per-modality imagined sequences (empty without decoders)
    cross_attention -- per-modality lists of decoder cross-attention
                       probabilities
    lfi -- reconstruction loss (`None` without decoders)
    gfa -- alignment loss (`None` without alignment)
    distance -- distance term contained in `gfa`
    """

    masked: ForwardTrace
    complete: Optional[ForwardTrace] = None
    decoded: list[Tensor] = field(default_factory=list)
    cross_attention: list[list[Tensor]] = field(default_factory=list)
    lfi: Optional[Tensor] = None
    gfa: Optional[Tensor] = None
    distance: Optional[Tensor] = None


def hfr_forward(batch: Batch, params, cfg: ModelConfig) -> ReconTrace:
    """
    Runs the classifier on the masked view of `batch` and, depending on
    `cfg`, the decoders and a second (weight-sharing) pass on the
    complete view for alignment.

    Moment-based distances are undefined for a single sample; the
    alignment term is then left out (`gfa` is `None`) for that batch.
    """
    trace = ReconTrace(masked=mct_forward(batch, params, cfg))
    if cfg.lfi_enabled:
        dtype = cfg.numpy_dtype
        for e, x, valid, m in zip(
            trace.masked.reinforced, batch.values, batch.valid, MODALITIES
        ):
            d, cross = lfi_decode(
                e, Tensor(x, dtype=dtype), valid, params, m, cfg
            )
            trace.decoded.append(d)
            trace.cross_attention.append(cross)
        trace.lfi = lfi_loss(batch.complete, trace.decoded, batch.masks)
    if cfg.gfa_enabled and (
        len(batch.labels) > 1 or cfg.gfa_metric not in MOMENT_METRICS
    ):
        trace.complete = mct_forward(batch, params, cfg, complete=True)
        trace.gfa, trace.distance = gfa_loss(
            trace.masked.fused,
            trace.complete.fused,
            trace.complete.probs,
            batch.labels,
            params,
            load_metric(cfg.gfa_metric, cfg.cmd_order),
        )
    return trace
