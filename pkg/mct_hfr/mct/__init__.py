from .config import ModelConfig
from .params import (
    ParamStore,
    init_params,
    param_shapes,
    mrau_layer_shapes,
    classifier_widths,
    signature,
)
from .attention import attend, attention_block, split_heads, merge_heads
from .encoder import positional_encoding, unimodal_encode
from .mrau import rescale_factors, key_scales, mrau_forward
from .pooling import attention_pool
from .model import ForwardTrace, classify, ce_loss, mct_forward
from .checkpoint import (
    encode_checkpoint,
    decode_checkpoint,
    save_checkpoint,
    load_checkpoint,
    data_signature,
    check_compatible,
)


__all__ = [
    "ModelConfig",
    "ParamStore",
    "init_params",
    "param_shapes",
    "mrau_layer_shapes",
    "classifier_widths",
    "signature",
    "attend",
    "attention_block",
    "split_heads",
    "merge_heads",
    "positional_encoding",
    "unimodal_encode",
    "rescale_factors",
    "key_scales",
    "mrau_forward",
    "attention_pool",
    "ForwardTrace",
    "classify",
    "ce_loss",
    "mct_forward",
    "encode_checkpoint",
    "decode_checkpoint",
    "save_checkpoint",
    "load_checkpoint",
    "data_signature",
    "check_compatible",
]
