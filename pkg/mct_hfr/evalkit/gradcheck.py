"""
End-to-end gradient check of the combined training objective on a
tiny model.
"""

from typing import Callable, Optional, Sequence
from dataclasses import dataclass, field

import numpy as np

from mct_hfr.util import get_rng, STREAM_TRAIN_MASK
from mct_hfr.models import DataModel
from mct_hfr.datasim import GenConfig, collate, generate_dataset, mask_batch
from mct_hfr.tensorlab import check_gradients
from mct_hfr.mct import ModelConfig, ce_loss, init_params
from mct_hfr.hfr import hfr_forward
from mct_hfr.trainer.objective import total_loss


DEFAULT_TOLERANCE = 1e-4
DEFAULT_METRICS = ("cmd", "cosine", "jsd")


def tiny_config(**kwargs) -> ModelConfig:
    """
    Returns the tiny 64-bit model used for gradient checks; `kwargs`
    override individual settings.
    """
    return ModelConfig(
        **(
            {
                "classes": 3,
                "dims": (5, 4, 3),
                "d": 8,
                "layers": 1,
                "heads": 2,
                "d_k": 4,
                "kernel_sizes": (3, 3, 1),
                "max_lengths": (6, 4, 5),
                "ffn_hidden": 16,
                "dtype": "float64",
            }
            | kwargs
        )
    )


def parameter_group(name: str) -> str:
    """
    Returns the group of parameter `name`, e.g. 'mrau.0' for
    'mrau.0.a.wq' and 'lfi.v' for 'lfi.v.block.0.sau.wk'.
    """
    parts = name.split(".")
    if parts[0] in ("pool", "classifier", "gfa"):
        return parts[0]
    return ".".join(parts[:2])


@dataclass
class GradcheckEntry(DataModel):
    """
    Outcome for one parameter tensor.

    Keyword arguments:
    metric -- alignment metric of the checked objective
    name -- parameter name
    max_rel_error -- largest relative error among probed entries
    worst_index -- flat index of the worst entry
    probes -- number of probed entries
    """

    metric: str
    name: str
    max_rel_error: float
    worst_index: int
    probes: int


@dataclass
class GradcheckReport(DataModel):
    """
    Gradient check result.

    Keyword arguments:
    tolerance -- largest acceptable relative error
    entries -- per-tensor outcomes
    """

    tolerance: float
    entries: list[GradcheckEntry] = field(default_factory=list)

    @property
    def groups(self) -> dict[str, float]:
        """Returns the largest relative error per parameter group."""
        result = {}
        for entry in self.entries:
            group = parameter_group(entry.name)
            result[group] = max(result.get(group, 0.0), entry.max_rel_error)
        return result

    @property
    def worst(self) -> Optional[GradcheckEntry]:
        """Returns the entry with the largest relative error."""
        if not self.entries:
            return None
        return max(self.entries, key=lambda e: e.max_rel_error)

    @property
    def max_rel_error(self) -> float:
        """Returns the largest relative error overall."""
        return 0.0 if self.worst is None else self.worst.max_rel_error

    @property
    def failed_groups(self) -> list[str]:
        """Returns the groups exceeding the tolerance."""
        return [g for g, e in self.groups.items() if e > self.tolerance]

    @property
    def passed(self) -> bool:
        """Returns `True` if all errors are within tolerance."""
        return self.max_rel_error <= self.tolerance

    def table(self) -> str:
        """Returns an aligned per-group table."""
        groups = self.groups
        width = max([len("group")] + [len(g) for g in groups])
        lines = [f"{'group':<{width}}  max_rel_error  status"]
        for group, error in groups.items():
            status = "ok" if error <= self.tolerance else "FAILED"
            lines.append(f"{group:<{width}}  {error:13.3e}  {status}")
        return "\n".join(lines)


def run_gradcheck(
    cfg: Optional[ModelConfig] = None,
    tolerance: float = DEFAULT_TOLERANCE,
    metrics: Sequence[str] = DEFAULT_METRICS,
    seed: int = 0,
    batch_size: int = 4,
    p_miss: float = 0.5,
    alpha: float = 0.4,
    beta: float = 0.6,
    probes: Optional[int] = None,
    analytic_hook: Optional[Callable[[str, np.ndarray], np.ndarray]] = None,
) -> GradcheckReport:
    """
    Compares analytic gradients of the combined objective against
    central finite differences for every parameter tensor, once per
    alignment metric in `metrics`.

    Keyword arguments:
    cfg -- model configuration; computations are forced to 64 bit
           (default None; uses `tiny_config()`)
    tolerance -- largest acceptable relative error
                 (default 1e-4)
    metrics -- alignment metrics to check
               (default ('cmd', 'cosine', 'jsd'))
    seed -- seed for data, initialization and masks
            (default 0)
    batch_size -- number of samples in the probe batch
                  (default 4)
    p_miss -- ablation probability of the probe batch
              (default 0.5)
    alpha -- weight of the alignment loss
             (default 0.4)
    beta -- weight of the reconstruction loss
            (default 0.6)
    probes -- maximum number of probed entries per tensor
              (default None; every entry)
    analytic_hook -- optional transformation of analytic gradients
                     `(name, grad) -> grad`
                     (default None)
    """
    _cfg = ModelConfig.from_json(
        (cfg or tiny_config()).json | {"dtype": "float64"}
    )
    samples = generate_dataset(
        GenConfig(
            seed=seed,
            classes=_cfg.classes,
            dims=_cfg.dims,
            length_ranges=tuple(
                (max(1, t // 2), t + 2) for t in _cfg.max_lengths
            ),
            max_lengths=tuple(t + 2 for t in _cfg.max_lengths),
        ),
        batch_size,
    )
    batch = mask_batch(
        collate(samples, _cfg.max_lengths),
        p_miss,
        get_rng(seed, STREAM_TRAIN_MASK),
    )

    report = GradcheckReport(tolerance=tolerance)
    for metric in metrics if _cfg.gfa_enabled else metrics[:1]:
        metric_cfg = ModelConfig.from_json(_cfg.json | {"gfa_metric": metric})
        params = init_params(metric_cfg, seed)

        def loss(metric_cfg=metric_cfg, params=params):
            trace = hfr_forward(batch, params, metric_cfg)
            return total_loss(
                ce_loss(trace.masked.probs, batch.labels),
                trace.gfa,
                trace.lfi,
                alpha,
                beta,
            )

        for result in check_gradients(
            loss,
            params,
            probes=probes,
            rng=get_rng(seed),
            analytic_hook=analytic_hook,
        ):
            report.entries.append(
                GradcheckEntry(
                    metric=metric,
                    name=result.name,
                    max_rel_error=result.max_rel_error,
                    worst_index=result.worst_index,
                    probes=result.probes,
                )
            )
    return report
