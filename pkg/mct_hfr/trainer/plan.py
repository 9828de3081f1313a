"""Training plan."""

from dataclasses import dataclass
from enum import Enum

from mct_hfr.errors import ConfigError
from mct_hfr.models import DataModel


class Strategy(Enum):
    """Training strategies with respect to ablated features."""

    COMPLETE = "complete"
    ONE_TO_ONE = "one_to_one"
    DYNAMIC = "dynamic"


@dataclass
class TrainPlan(DataModel):
    """
    Optimization settings and strategy of a training run.

    Keyword arguments:
    seed -- seed for initialization, shuffling and masking
    strategy -- 'complete' (never ablate), 'one_to_one' (ablate every
                sample at `p_miss`) or 'dynamic' (ablate a ramped
                fraction of every batch at `p_miss`)
                (default Strategy.DYNAMIC)
    alpha -- weight of the alignment loss
             (default 0.4)
    beta -- weight of the reconstruction loss
            (default 0.6)
    p_miss -- per-step ablation probability
              (default 0.2)
    lr -- learning rate
          (default 1e-4)
    weight_decay -- decoupled weight decay
                    (default 0.01)
    batch_size -- samples per optimization step
                  (default 32)
    epochs -- maximum number of epochs
              (default 40)
    patience -- epochs without improvement of the validation loss
                before stopping
                (default 8)
    ramp_epochs -- epochs until the dynamic strategy ablates full
                   batches
                   (default 5)
    """

    seed: int
    strategy: Strategy = Strategy.DYNAMIC
    alpha: float = 0.4
    beta: float = 0.6
    p_miss: float = 0.2
    lr: float = 1e-4
    weight_decay: float = 0.01
    batch_size: int = 32
    epochs: int = 40
    patience: int = 8
    ramp_epochs: int = 5

    def __post_init__(self):
        problems = []
        if isinstance(self.strategy, str):
            try:
                self.strategy = Strategy(self.strategy.replace("-", "_"))
            except ValueError:
                problems.append(
                    f"unknown strategy '{self.strategy}' (allowed: "
                    + ", ".join(s.value for s in Strategy)
                    + ")."
                )
        if self.alpha < 0 or self.beta < 0:
            problems.append(
                f"alpha and beta must be non-negative (got {self.alpha}, "
                + f"{self.beta})."
            )
        if not 0 <= self.p_miss <= 1:
            problems.append(f"p_miss must be in [0, 1] (got {self.p_miss}).")
        if self.lr <= 0 or self.weight_decay < 0:
            problems.append(
                "lr must be positive and weight_decay non-negative."
            )
        if self.batch_size < 1:
            problems.append(
                f"batch_size must be positive (got {self.batch_size})."
            )
        if self.epochs < 1:
            problems.append(f"epochs must be positive (got {self.epochs}).")
        if self.patience < 1:
            problems.append(
                f"patience must be positive (got {self.patience})."
            )
        if self.ramp_epochs < 1:
            problems.append(
                f"ramp_epochs must be positive (got {self.ramp_epochs})."
            )
        if problems:
            raise ConfigError(problems)

    @property
    def masks_training_data(self) -> bool:
        """Returns `True` if the strategy ablates training samples."""
        return self.strategy is not Strategy.COMPLETE
