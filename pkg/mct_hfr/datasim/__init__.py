from .config import GenConfig
from .sample import MultimodalSample, MaskSet
from .generate import (
    Prototypes,
    generate_sample,
    generate_dataset,
    balanced_labels,
    scaled_lengths,
    split_dataset,
)
from .masking import draw_indicators, apply_masking
from .batch import Batch, collate, mask_batch
from .container import (
    ContainerHeader,
    encode_dataset,
    decode_dataset,
    save_dataset,
    load_dataset,
    read_header,
)


__all__ = [
    "GenConfig",
    "MultimodalSample",
    "MaskSet",
    "Prototypes",
    "generate_sample",
    "generate_dataset",
    "balanced_labels",
    "scaled_lengths",
    "split_dataset",
    "draw_indicators",
    "apply_masking",
    "Batch",
    "collate",
    "mask_batch",
    "ContainerHeader",
    "encode_dataset",
    "decode_dataset",
    "save_dataset",
    "load_dataset",
    "read_header",
]
