from .plan import Strategy, TrainPlan
from .objective import total_loss, ramp_proportion, incomplete_rows
from .records import LossRecord, EpochRecord, TrainLog
from .loop import (
    batch_indices,
    validation_batches,
    evaluate_losses,
    train,
)


__all__ = [
    "Strategy",
    "TrainPlan",
    "total_loss",
    "ramp_proportion",
    "incomplete_rows",
    "LossRecord",
    "EpochRecord",
    "TrainLog",
    "batch_indices",
    "validation_batches",
    "evaluate_losses",
    "train",
]
