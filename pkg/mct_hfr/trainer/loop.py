"""
Training loop for the classifier and its reconstruction branch.
"""

from typing import Callable, Optional, Sequence
from pathlib import Path
from time import perf_counter

import numpy as np

from mct_hfr.errors import NonFiniteError
from mct_hfr.util import (
    get_rng,
    write_json,
    STREAM_SHUFFLE,
    STREAM_TRAIN_MASK,
    STREAM_VALIDATION_MASK,
)
from mct_hfr.logger import LoggingContext as Context
from mct_hfr.logging import Logging
from mct_hfr.datasim import (
    Batch,
    MultimodalSample,
    apply_masking,
    collate,
    mask_batch,
)
from mct_hfr.tensorlab import AdamW, no_grad
from mct_hfr.mct import (
    ModelConfig,
    ParamStore,
    ce_loss,
    init_params,
    save_checkpoint,
)
from mct_hfr.hfr import hfr_forward
from mct_hfr.evalkit.metrics import compute_metrics
from .plan import Strategy, TrainPlan
from .objective import incomplete_rows, ramp_proportion, total_loss
from .records import EpochRecord, LossRecord, TrainLog


CHECKPOINT_NAME = "checkpoint.mctp"
LOG_NAME = "train_log.json"
JSONL_NAME = "train.jsonl"


def batch_indices(
    n: int, batch_size: int, rng: Optional[np.random.Generator] = None
) -> list[np.ndarray]:
    """
    Returns (shuffled if `rng` is given) index chunks of at most
    `batch_size`. For `batch_size` above 1, a trailing chunk with a
    single sample is merged into its predecessor; other single-sample
    batches are handled by `hfr_forward`.
    """
    order = np.arange(n) if rng is None else rng.permutation(n)
    chunks = [order[i : i + batch_size] for i in range(0, n, batch_size)]
    if batch_size > 1 and len(chunks) > 1 and len(chunks[-1]) == 1:
        chunks[-2] = np.concatenate(chunks[-2:])
        chunks.pop()
    return chunks


def _check_splits(
    cfg: ModelConfig,
    train_samples: Sequence[MultimodalSample],
    val_samples: Sequence[MultimodalSample],
) -> None:
    if len(train_samples) == 0 or len(val_samples) == 0:
        raise ValueError(
            f"Training needs non-empty splits (got {len(train_samples)} "
            + f"training and {len(val_samples)} validation samples)."
        )
    overlap = {s.index for s in train_samples} & {s.index for s in val_samples}
    if overlap:
        raise ValueError(
            f"Training and validation splits share {len(overlap)} sample(s) "
            + f"(e.g. index {min(overlap)})."
        )
    for sample in (*train_samples, *val_samples):
        if tuple(sample.dims) != tuple(cfg.dims) or not (
            0 <= sample.label < cfg.classes
        ):
            raise ValueError(
                f"Sample {sample.index} (dims {list(sample.dims)}, label "
                + f"{sample.label}) does not fit a model with dims "
                + f"{list(cfg.dims)} and {cfg.classes} classes."
            )


class _Accumulator:
    """Sample-weighted running means of the loss components."""

    def __init__(self) -> None:
        self.count = 0
        self.sums = {"total": 0.0, "ce": 0.0, "gfa": 0.0, "lfi": 0.0}

    def add(self, size: int, **losses: float) -> None:
        self.count += size
        for key, value in losses.items():
            self.sums[key] += size * value

    def record(self) -> LossRecord:
        return LossRecord(
            **{k: v / max(self.count, 1) for k, v in self.sums.items()}
        )


def _losses(batch: Batch, params, cfg: ModelConfig, plan: TrainPlan):
    trace = hfr_forward(batch, params, cfg)
    ce = ce_loss(trace.masked.probs, batch.labels)
    return (
        trace,
        ce,
        total_loss(ce, trace.gfa, trace.lfi, plan.alpha, plan.beta),
    )


def _components(trace, ce, total) -> dict[str, float]:
    return {
        "total": total.item(),
        "ce": ce.item(),
        "gfa": 0.0 if trace.gfa is None else trace.gfa.item(),
        "lfi": 0.0 if trace.lfi is None else trace.lfi.item(),
    }


def validation_batches(
    samples: Sequence[MultimodalSample],
    cfg: ModelConfig,
    plan: TrainPlan,
) -> list[Batch]:
    """
    Returns the batches used for validation. Samples are ablated at
    `p_miss` with masks fixed by the plan's seed unless the strategy
    is 'complete'.
    """
    batches = []
    for chunk in batch_indices(len(samples), plan.batch_size):
        _samples = [samples[i] for i in chunk]
        masks = (
            [
                apply_masking(
                    s, plan.p_miss, plan.seed, STREAM_VALIDATION_MASK
                )[1]
                for s in _samples
            ]
            if plan.masks_training_data
            else None
        )
        batches.append(collate(_samples, cfg.max_lengths, masks))
    return batches


def evaluate_losses(
    batches: Sequence[Batch], params, cfg: ModelConfig, plan: TrainPlan
) -> tuple[LossRecord, np.ndarray, np.ndarray]:
    """
    Returns mean losses, predictions and labels over `batches` without
    recording gradients.
    """
    accumulator = _Accumulator()
    preds, labels = [], []
    with no_grad():
        for batch in batches:
            trace, ce, total = _losses(batch, params, cfg, plan)
            accumulator.add(batch.size, **_components(trace, ce, total))
            preds.append(trace.masked.predictions())
            labels.append(batch.labels)
    return accumulator.record(), np.concatenate(preds), np.concatenate(labels)


def train(
    plan: TrainPlan,
    cfg: ModelConfig,
    train_samples: Sequence[MultimodalSample],
    val_samples: Sequence[MultimodalSample],
    out_dir: Optional[str | Path] = None,
    params: Optional[ParamStore] = None,
    on_step: Optional[Callable[[int, ParamStore], None]] = None,
) -> tuple[ParamStore, TrainLog]:
    """
    Trains a model and returns the parameters of the epoch with the
    lowest validation loss together with the run log.

    Keyword arguments:
    plan -- training plan
    cfg -- model configuration
    train_samples -- training split
    val_samples -- validation split (disjoint from `train_samples`)
    out_dir -- if given, the checkpoint, the log document and the
               line-delimited message log are written here
               (default None)
    params -- initial parameters
              (default None; initialized from `plan.seed`)
    on_step -- optional callback receiving the 1-based global step and
               the parameters after every update
               (default None)
    """
    _check_splits(cfg, train_samples, val_samples)
    _params = params if params is not None else init_params(cfg, plan.seed)
    optimizer = AdamW(_params, lr=plan.lr, weight_decay=plan.weight_decay)
    shuffle_rng = get_rng(plan.seed, STREAM_SHUFFLE)
    validation = validation_batches(val_samples, cfg, plan)
    train_log = TrainLog(plan=plan, model=cfg)
    train_log.log.log(
        Context.STARTUP,
        body=f"Training on {len(train_samples)} samples (validation: "
        + f"{len(val_samples)}) with strategy '{plan.strategy.value}' and "
        + f"{_params.num_parameters} parameters.",
    )

    best, best_loss, step = _params.clone(), np.inf, 0
    for epoch in range(1, plan.epochs + 1):
        started = perf_counter()
        mask_rng = get_rng(plan.seed, STREAM_TRAIN_MASK, epoch)
        fraction = (
            ramp_proportion(epoch, plan.ramp_epochs)
            if plan.strategy is Strategy.DYNAMIC
            else 1.0
        )
        accumulator = _Accumulator()
        incomplete = []
        for chunk in batch_indices(
            len(train_samples), plan.batch_size, shuffle_rng
        ):
            step += 1
            batch = collate([train_samples[i] for i in chunk], cfg.max_lengths)
            if plan.masks_training_data:
                batch = mask_batch(
                    batch,
                    plan.p_miss,
                    mask_rng,
                    incomplete_rows(batch.size, fraction),
                )
            incomplete.append(int(batch.incomplete.sum()))
            trace, ce, total = _losses(batch, _params, cfg, plan)
            if not np.isfinite(total.item()):
                train_log.log.log(
                    Context.ERROR,
                    body=f"Non-finite loss at step {step} (epoch {epoch}).",
                )
                raise NonFiniteError(
                    f"Training diverged: non-finite loss at step {step} "
                    + f"(epoch {epoch})."
                )
            accumulator.add(batch.size, **_components(trace, ce, total))
            total.backward()
            try:
                optimizer.step()
            except NonFiniteError as exc_info:
                raise NonFiniteError(
                    f"Training diverged at step {step} (epoch {epoch}): "
                    + str(exc_info)
                ) from exc_info
            optimizer.zero_grad()
            if on_step is not None:
                on_step(step, _params)

        val_losses, preds, labels = evaluate_losses(
            validation, _params, cfg, plan
        )
        if not np.isfinite(val_losses.total):
            raise NonFiniteError(
                "Training diverged: non-finite validation loss after step "
                + f"{step} (epoch {epoch})."
            )
        record = EpochRecord(
            epoch=epoch,
            train=accumulator.record(),
            validation=val_losses,
            metrics=compute_metrics(preds, labels, cfg.classes),
            incomplete=incomplete,
            wall_time=perf_counter() - started,
        )
        train_log.epochs.append(record)
        message = (
            f"Epoch {epoch}: train loss {record.train.total:.5f}, validation "
            + f"loss {record.validation.total:.5f}, validation UA "
            + f"{record.metrics.ua:.4f}."
        )
        train_log.log.log(Context.TRAINING, body=message)
        Logging.info(message)

        if val_losses.total < best_loss:
            best, best_loss = _params.clone(), val_losses.total
            train_log.best_epoch = epoch
        elif epoch - train_log.best_epoch >= plan.patience:
            train_log.stopped_epoch = epoch
            train_log.log.log(
                Context.EVENT,
                body=f"Stopping early after epoch {epoch} (best epoch "
                + f"{train_log.best_epoch}).",
            )
            break

    if out_dir is not None:
        _out = Path(out_dir)
        path = save_checkpoint(_out / CHECKPOINT_NAME, cfg, best)
        train_log.checkpoint = str(path)
        train_log.log.log(
            Context.FILE_SYSTEM, body=f"Wrote checkpoint '{path}'."
        )
        (_out / JSONL_NAME).write_text(train_log.log.jsonl(), encoding="utf-8")
        write_json(_out / LOG_NAME, train_log.json)
    return best, train_log
