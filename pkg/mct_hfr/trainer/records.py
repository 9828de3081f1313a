"""Records of a training run."""

from typing import Optional
from dataclasses import dataclass, field

from mct_hfr.models import DataModel
from mct_hfr.logger import Logger
from mct_hfr.mct import ModelConfig
from mct_hfr.evalkit.metrics import MetricsRecord
from .plan import TrainPlan
from .objective import total_loss


@dataclass
class LossRecord(DataModel):
    """
    Sample-weighted mean losses over an epoch.

    Keyword arguments:
    total -- combined objective
    ce -- classification loss of the (masked) view
    gfa -- alignment loss (0 if disabled)
    lfi -- reconstruction loss (0 if disabled)
    """

    total: float = 0.0
    ce: float = 0.0
    gfa: float = 0.0
    lfi: float = 0.0

    def recombined(self, alpha: float, beta: float) -> float:
        """Returns the objective recomputed from the components."""
        return total_loss(self.ce, self.gfa, self.lfi, alpha, beta)


@dataclass
class EpochRecord(DataModel):
    """
    Summary of one epoch.

    Keyword arguments:
    epoch -- 1-based epoch index
    train -- training losses
    validation -- validation losses
    metrics -- validation scores
    incomplete -- number of ablated samples per training batch
    wall_time -- duration in seconds
    """

    epoch: int
    train: LossRecord
    validation: LossRecord
    metrics: MetricsRecord
    incomplete: list[int] = field(default_factory=list)
    wall_time: float = 0.0


@dataclass
class TrainLog(DataModel):
    """
    Log of a training run.

    Keyword arguments:
    plan -- training plan
    model -- model configuration
    epochs -- per-epoch records in order
    best_epoch -- epoch with the lowest validation loss
    stopped_epoch -- epoch after which training stopped early (`None`
                     if all epochs ran)
    checkpoint -- path of the written checkpoint, if any
    log -- run messages
    """

    plan: TrainPlan
    model: ModelConfig
    epochs: list[EpochRecord] = field(default_factory=list)
    best_epoch: Optional[int] = None
    stopped_epoch: Optional[int] = None
    checkpoint: Optional[str] = None
    log: Logger = field(
        default_factory=lambda: Logger(default_origin="Trainer")
    )

    @DataModel.serialization_handler("log")
    @classmethod
    def log_serialization(cls, value):
        """Performs `log`-serialization."""
        return value.json

    @DataModel.deserialization_handler("log")
    @classmethod
    def log_deserialization(cls, value):
        """Performs `log`-deserialization."""
        return Logger.from_json(value)

    def losses(self, split: str = "validation") -> list[float]:
        """Returns the total losses of `split` per epoch."""
        return [getattr(e, split).total for e in self.epochs]
