from .metrics import (
    METRIC_OPTIONS,
    Metric,
    load_metric,
    cmd,
    cosine_distance,
    jsd,
    smooth_l1_distance,
)
from .decoder import lfi_decode
from .losses import lfi_loss, gfa_loss
from .branch import ReconTrace, hfr_forward


__all__ = [
    "METRIC_OPTIONS",
    "Metric",
    "load_metric",
    "cmd",
    "cosine_distance",
    "jsd",
    "smooth_l1_distance",
    "lfi_decode",
    "lfi_loss",
    "gfa_loss",
    "ReconTrace",
    "hfr_forward",
]
