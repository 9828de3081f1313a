from .metrics import (
    SCORES,
    MetricsRecord,
    compute_metrics,
    mean_metrics,
    auilc,
)
from .pool import ShardPool
from .sweep import (
    DEFAULT_RATES,
    SweepRun,
    SweepReport,
    SweepShard,
    evaluate_masked,
    sweep,
    write_sweep,
)
from .complexity import (
    DEFAULT_LENGTHS,
    LayerKind,
    CountMode,
    Complexity,
    affine_params,
    pairwise_layer_shapes,
    enumerate_params,
    count_params_macs,
    count_model,
)
from .gradcheck import (
    DEFAULT_TOLERANCE,
    GradcheckEntry,
    GradcheckReport,
    parameter_group,
    tiny_config,
    run_gradcheck,
)
from .lengths import (
    LengthInterval,
    LengthReport,
    ExtrapolationResult,
    total_lengths,
    evaluate_by_length,
    extrapolation_samples,
    length_extrapolation,
)


__all__ = [
    "SCORES",
    "MetricsRecord",
    "compute_metrics",
    "mean_metrics",
    "auilc",
    "ShardPool",
    "DEFAULT_RATES",
    "SweepRun",
    "SweepReport",
    "SweepShard",
    "evaluate_masked",
    "sweep",
    "write_sweep",
    "DEFAULT_LENGTHS",
    "LayerKind",
    "CountMode",
    "Complexity",
    "affine_params",
    "pairwise_layer_shapes",
    "enumerate_params",
    "count_params_macs",
    "count_model",
    "DEFAULT_TOLERANCE",
    "GradcheckEntry",
    "GradcheckReport",
    "parameter_group",
    "tiny_config",
    "run_gradcheck",
    "LengthInterval",
    "LengthReport",
    "ExtrapolationResult",
    "total_lengths",
    "evaluate_by_length",
    "extrapolation_samples",
    "length_extrapolation",
]
