from .tensor import Tensor, as_tensor, matmul, concat, no_grad, grad_enabled
from .functional import (
    softmax_rows,
    layer_norm,
    conv1d_temporal,
    smooth_l1,
    norm,
    neg_log_pick,
)
from .optim import OptimState, adamw_step, AdamW
from .init import xavier_uniform, zeros, ones
from .gradcheck import ProbeResult, check_gradients, relative_error


__all__ = [
    "Tensor",
    "as_tensor",
    "matmul",
    "concat",
    "no_grad",
    "grad_enabled",
    "softmax_rows",
    "layer_norm",
    "conv1d_temporal",
    "smooth_l1",
    "norm",
    "neg_log_pick",
    "OptimState",
    "adamw_step",
    "AdamW",
    "xavier_uniform",
    "zeros",
    "ones",
    "ProbeResult",
    "check_gradients",
    "relative_error",
]
