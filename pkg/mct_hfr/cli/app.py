"""
Command line interface `mct-hfr`.

Exit codes: 0 success, 1 check failure or runtime error, 2 usage or
configuration error.
"""

from typing import Any, Optional, Sequence
import sys
from pathlib import Path
import argparse
from collections import Counter

from mct_hfr.errors import (
    CheckpointMismatchError,
    ConfigError,
    FormatError,
    NonFiniteError,
)
from mct_hfr.logging import Logging
from mct_hfr.util import make_path
from mct_hfr.datasim import (
    generate_dataset,
    load_dataset,
    read_header,
    save_dataset,
    split_dataset,
)
from mct_hfr.mct import load_checkpoint
from mct_hfr.trainer import train
from mct_hfr.evalkit import (
    DEFAULT_TOLERANCE,
    CountMode,
    LayerKind,
    count_model,
    count_params_macs,
    run_gradcheck,
    sweep,
    tiny_config,
    write_sweep,
)
from .config import SECTIONS, RunConfig


EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
CONFIG_SNAPSHOT_NAME = "config.ini"


class UsageError(Exception):
    """Raised on conflicting command line arguments."""


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc_info:
        raise argparse.ArgumentTypeError(
            f"expected an integer but found '{text}'"
        ) from exc_info
    if value < 1:
        raise argparse.ArgumentTypeError(
            f"expected a positive integer but found {value}"
        )
    return value


def _list_of(section: str, key: str):
    """
    Returns an argparse-type that parses comma-separated values like
    the configuration key `key` of `section`.
    """
    arg = SECTIONS[section].properties[key]

    def parse(text: str) -> list:
        try:
            value = arg.parse(text)
        except ValueError as exc_info:
            raise argparse.ArgumentTypeError(str(exc_info)) from exc_info
        ok, reason = arg.validate(value)
        if not ok:
            raise argparse.ArgumentTypeError(reason)
        return value

    return parse


def _load_config(
    path: Optional[str],
    overrides: Optional[dict[str, dict[str, Any]]] = None,
    require: Sequence[str] = tuple(SECTIONS),
) -> RunConfig:
    text = ""
    if path is not None:
        try:
            text = make_path(path).read_text(encoding="utf-8")
        except OSError as exc_info:
            raise ConfigError(
                [f"cannot read configuration '{path}': {exc_info}"]
            ) from exc_info
    return RunConfig.parse(text, overrides, require)


def _print_pairs(pairs: Sequence[tuple[str, Any]]) -> None:
    for key, value in pairs:
        print(f"{key}={value}")


def cmd_gen_data(args: argparse.Namespace) -> int:
    """Generates a synthetic dataset."""
    config = _load_config(
        args.config, {"data": {"seed": args.seed}}, require=("data",)
    )
    gen_cfg = config.gen_config()
    samples = generate_dataset(gen_cfg, args.n)
    pairs = []
    if args.test_out is not None:
        samples, test_samples = split_dataset(
            samples, config.data["test_fraction"], gen_cfg.seed
        )
        path = save_dataset(
            args.test_out, test_samples, gen_cfg.classes, gen_cfg.dims
        )
        pairs.append(("test_samples", len(test_samples)))
        Logging.info(f"Wrote {len(test_samples)} test samples to '{path}'.")
    path = save_dataset(args.out, samples, gen_cfg.classes, gen_cfg.dims)
    Logging.info(f"Wrote {len(samples)} samples to '{path}'.")
    histogram = Counter(s.label for s in samples)
    _print_pairs(
        [("samples", len(samples))]
        + pairs
        + [
            (f"class.{c}", histogram.get(c, 0))
            for c in range(gen_cfg.classes)
        ]
    )
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    """Trains a model on a dataset file."""
    header = read_header(args.data)
    config = _load_config(
        args.config,
        {
            "data": {
                "seed": args.seed,
                "classes": header.classes,
                "dims": list(header.dims),
            },
            "model": {
                "layers": args.layers,
                "hfr": False if args.no_hfr else None,
            },
            "train": {
                "seed": args.seed,
                "strategy": (
                    args.strategy.replace("-", "_") if args.strategy else None
                ),
                "p_miss": args.miss_rate,
                "alpha": args.alpha,
                "beta": args.beta,
                "epochs": args.epochs,
            },
        },
        require=("train",),
    )
    plan = config.train_plan()
    if args.miss_rate is not None and not plan.masks_training_data:
        raise UsageError(
            "--miss-rate has no effect with strategy "
            + f"'{plan.strategy.value}'"
        )
    cfg = config.model_config(header.classes, header.dims)
    train_samples, val_samples = split_dataset(
        load_dataset(args.data), config.train["val_fraction"], plan.seed
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / CONFIG_SNAPSHOT_NAME).write_text(
        config.serialize(), encoding="utf-8"
    )
    _, train_log = train(plan, cfg, train_samples, val_samples, out)
    best = train_log.epochs[train_log.best_epoch - 1]
    _print_pairs(
        [
            ("epochs", len(train_log.epochs)),
            ("best_epoch", train_log.best_epoch),
            ("stopped_epoch", train_log.stopped_epoch or "none"),
            ("validation_loss", f"{best.validation.total:.6g}"),
            ("checkpoint", train_log.checkpoint),
        ]
    )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    """Evaluates a checkpoint over a range of missing rates."""
    config = _load_config(
        args.config,
        {
            "eval": {
                "rates": args.rates,
                "mask_seeds": args.mask_seeds,
                "workers": args.workers,
            }
        },
        require=(),
    )
    cfg, params = load_checkpoint(args.checkpoint)
    report, shards = sweep(
        params,
        cfg,
        load_dataset(args.data),
        rates=config.eval["rates"],
        mask_seeds=config.eval["mask_seeds"],
        workers=config.eval["workers"],
        batch_size=config.eval["batch_size"],
        keep_embeddings=args.embeddings,
        checkpoint=str(args.checkpoint),
    )
    paths = write_sweep(report, args.out, shards)
    pairs = [
        (f"rate.{rate:g}.ua", f"{mean.ua:.6f}")
        for rate, mean in zip(report.rates, report.means)
    ]
    if report.area is None:
        pairs.append(("area", "absent"))
    else:
        pairs += [
            (f"area.{name}", f"{value:.6f}")
            for name, value in sorted(report.area.items())
        ]
    _print_pairs(pairs + [("file", p) for p in paths])
    return EXIT_OK


def cmd_gradcheck(args: argparse.Namespace) -> int:
    """Runs the finite-difference check of the training objective."""
    config = _load_config(args.config, require=())
    cfg = tiny_config(
        **{key: config.model[key] for key in config.explicit["model"]}
    )
    report = run_gradcheck(cfg, tolerance=args.tolerance, probes=args.probes)
    print(report.table())
    if not report.passed:
        print(
            "Gradient check failed for parameter group(s): "
            + ", ".join(report.failed_groups),
            file=sys.stderr,
        )
        return EXIT_FAILURE
    return EXIT_OK


def cmd_params(args: argparse.Namespace) -> int:
    """Prints parameter counts and MAC estimates."""
    config = _load_config(args.config, require=())
    cfg = config.model_config()
    lengths = args.lengths or cfg.max_lengths
    counts = [
        ("layer", count_params_macs(cfg, kind, lengths))
        for kind in LayerKind
    ] + [("model", count_model(cfg, mode, lengths)) for mode in CountMode]
    pairs = [("lengths", ",".join(map(str, lengths)))]
    for prefix, count in counts:
        pairs += [
            (f"{prefix}.{count.name}.params", count.params),
            (f"{prefix}.{count.name}.macs", count.macs),
        ]
    _print_pairs(pairs)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Returns the argument parser of `mct-hfr`."""
    parser = argparse.ArgumentParser(
        prog="mct-hfr",
        description="Modality-collaborative transformer with hybrid "
        + "feature reconstruction on synthetic multimodal data.",
    )
    parser.add_argument(
        "--loglevel",
        choices=["none", "error", "info", "debug"],
        default="error",
        help="console loglevel (messages go to standard error)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen_data = commands.add_parser("gen-data", help=cmd_gen_data.__doc__)
    gen_data.add_argument("--config", help="run configuration file")
    gen_data.add_argument("--out", required=True, help="dataset file")
    gen_data.add_argument(
        "-n", type=_positive_int, required=True, help="number of samples"
    )
    gen_data.add_argument("--seed", type=int, help="overrides [data] seed")
    gen_data.add_argument(
        "--test-out",
        help="if given, a test split ([data] test_fraction) is written here",
    )
    gen_data.set_defaults(func=cmd_gen_data)

    train_ = commands.add_parser("train", help=cmd_train.__doc__)
    train_.add_argument("--config", help="run configuration file")
    train_.add_argument("--data", required=True, help="dataset file")
    train_.add_argument("--out", required=True, help="output directory")
    train_.add_argument(
        "--strategy", choices=["complete", "one-to-one", "dynamic"]
    )
    train_.add_argument("--miss-rate", type=float, help="ablation rate")
    train_.add_argument("--alpha", type=float, help="alignment weight")
    train_.add_argument("--beta", type=float, help="reconstruction weight")
    train_.add_argument("--seed", type=int, help="overrides the seeds")
    train_.add_argument("--layers", type=int, help="attention layers")
    train_.add_argument("--epochs", type=_positive_int)
    train_.add_argument(
        "--no-hfr",
        action="store_true",
        help="train the transformer without reconstruction branch",
    )
    train_.set_defaults(func=cmd_train)

    sweep_ = commands.add_parser("sweep", help=cmd_sweep.__doc__)
    sweep_.add_argument("--checkpoint", required=True)
    sweep_.add_argument("--data", required=True, help="test dataset file")
    sweep_.add_argument("--out", required=True, help="output directory")
    sweep_.add_argument("--config", help="run configuration file")
    sweep_.add_argument(
        "--rates",
        type=_list_of("eval", "rates"),
        help="comma-separated missing rates",
    )
    sweep_.add_argument(
        "--mask-seeds",
        type=_list_of("eval", "mask_seeds"),
        help="comma-separated mask seeds",
    )
    sweep_.add_argument("--workers", type=_positive_int)
    sweep_.add_argument(
        "--embeddings",
        action="store_true",
        help="also write pooled fused vectors",
    )
    sweep_.set_defaults(func=cmd_sweep)

    gradcheck = commands.add_parser("gradcheck", help=cmd_gradcheck.__doc__)
    gradcheck.add_argument(
        "--config", help="[model] keys replace those of the tiny model"
    )
    gradcheck.add_argument(
        "--tolerance", type=float, default=DEFAULT_TOLERANCE
    )
    gradcheck.add_argument(
        "--probes",
        type=_positive_int,
        help="probed entries per tensor (default: all)",
    )
    gradcheck.set_defaults(func=cmd_gradcheck)

    params = commands.add_parser("params", help=cmd_params.__doc__)
    params.add_argument("--config", help="run configuration file")
    params.add_argument(
        "--lengths",
        type=_list_of("model", "max_lengths"),
        help="sequence lengths (a, v, l) (default: [model] max_lengths)",
    )
    params.set_defaults(func=cmd_params)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of `mct-hfr`; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc_info:
        return exc_info.code if isinstance(exc_info.code, int) else 2
    if args.command == "train" and (
        args.strategy == "complete" and args.miss_rate is not None
    ):
        print(
            "mct-hfr train: error: --miss-rate conflicts with "
            + "--strategy complete",
            file=sys.stderr,
        )
        return EXIT_USAGE
    Logging.set_level(args.loglevel)

    try:
        return args.func(args)
    except (ConfigError, CheckpointMismatchError, UsageError) as exc_info:
        print(f"mct-hfr {args.command}: {exc_info}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, FormatError, NonFiniteError, ValueError) as exc_info:
        print(f"mct-hfr {args.command}: {exc_info}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
