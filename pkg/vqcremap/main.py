"""The vqcremap command line.

    vqcremap run --dataset iris --remap tanh --seed 0
    vqcremap sweep --dataset iris seeds --embedding angle
    vqcremap compare
    vqcremap report --out results
    vqcremap anova --out results
    vqcremap plot --out results --top 3

Settings come from RunConfig defaults, then --config FILE, then the flags.
"""
from typing import Any, Callable, Dict, List, Optional, Sequence
import argparse
import logging
import sys

from oslash.either import Left  # type: ignore

from .codes import EXIT_FAILURE, EXIT_OK, EXIT_USAGE
from .config import (
    DEFAULT_SEEDS,
    MODELS,
    RunConfig,
    load_config_file,
    make_config,
    merge,
)
from .data import DATASET_NAMES
from .embedding import EMBEDDINGS
from .exceptions import ConfigurationError, VqcError
from .metrics import ANCHORS, BASELINE
from .plot import plot
from .remap import REMAP_NAMES
from .report import anova_table, by_setting, report
from .result import ErrorResult
from .runner import read_records, run
from .sweep import SweepResult, compare, sweep

PROG = "vqcremap"
# Errors from these stages are the user's to fix.
USAGE_STAGES = ("config",)


def add_run_flags(parser: argparse.ArgumentParser, command: str = "run") -> None:
    """Flags shared by run, sweep and compare. None means "not given"."""
    parser.add_argument("--config", help="JSON file of settings")
    if command == "sweep":
        parser.add_argument("--dataset", nargs="+", choices=DATASET_NAMES)
        parser.add_argument("--remap", nargs="+", choices=REMAP_NAMES)
    if command != "run":
        parser.add_argument("--seeds", nargs="+", type=int, help="(default 0 to 9)")
        parser.add_argument("--workers", type=int, help="parallel runs (default 1)")
    else:
        parser.add_argument("--dataset", choices=DATASET_NAMES)
        parser.add_argument("--remap", choices=REMAP_NAMES)
        parser.add_argument("--seed", type=int)
    parser.add_argument("--data-dir", dest="data_dir")
    parser.add_argument("--embedding", choices=EMBEDDINGS)
    parser.add_argument("--reupload", action="store_true", default=None)
    parser.add_argument(
        "--no-reupload", dest="reupload", action="store_false", default=None
    )
    parser.add_argument("--model", choices=MODELS)
    parser.add_argument("--layers", type=int, help="variational layers (default 6)")
    parser.add_argument("--lr", type=float, help="learning rate (default 0.01)")
    parser.add_argument("--batch-size", dest="batch_size", type=int, help="(default 5)")
    parser.add_argument("--epochs", type=int, help="(default 30)")
    parser.add_argument("--out", help="results directory (default results)")


def add_report_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=RunConfig().out)
    parser.add_argument("--k", type=float, default=1.0, help="POC threshold factor")
    parser.add_argument(
        "--anchor",
        choices=ANCHORS,
        default=BASELINE,
        help="compare at the baseline's POC, or each run at its own",
    )


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG, description="Weight re-mapping for variational quantum classifiers"
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    commands = parser.add_subparsers(dest="command", required=True)
    add_run_flags(commands.add_parser("run", help="train one configuration"))
    add_run_flags(
        commands.add_parser("sweep", help="datasets × approaches × seeds"), "sweep"
    )
    add_run_flags(
        commands.add_parser(
            "compare", help="circuits against the classical baseline on two-class Iris"
        ),
        "compare",
    )
    add_report_flags(commands.add_parser("report", help="rebuild the tables"))
    anova_parser = commands.add_parser("anova", help="print the ANOVA tables")
    anova_parser.add_argument("--out", default=RunConfig().out)
    plot_parser = commands.add_parser("plot", help="write SVG learning curves")
    plot_parser.add_argument("--out", default=RunConfig().out)
    plot_parser.add_argument("--top", type=int, help="show only the top N approaches")
    return parser


def settings(args: argparse.Namespace) -> Dict[str, Any]:
    """Config file values overlaid with the flags that were given."""
    flags = {
        key: value
        for key, value in vars(args).items()
        if key in RunConfig._fields or key in ("seeds", "workers")
    }
    # Sweep flags take lists; the single-run fields get a placeholder.
    for key in ("dataset", "remap"):
        if isinstance(flags.get(key), list):
            flags[key] = None
    from_file = load_config_file(args.config) if args.config else {}
    return merge(from_file, flags)


def fail(error: ErrorResult) -> int:
    print(f"{PROG}: {error}", file=sys.stderr)
    return EXIT_USAGE if error.stage in USAGE_STAGES else EXIT_FAILURE


def sweep_exit(result: SweepResult) -> int:
    print(
        f"{len(result.completed)} completed, {len(result.skipped)} skipped, "
        f"{len(result.failed)} failed"
    )
    for identifier, error in result.failed:
        print(f"{PROG}: {identifier}: {error}", file=sys.stderr)
    return EXIT_FAILURE if result.failed else EXIT_OK


def command_run(args: argparse.Namespace) -> int:
    result = run(make_config(settings(args)))
    if isinstance(result, Left):
        return fail(result._error)
    print(f"test accuracy {result._value.result.test_acc:.3f}")
    return EXIT_OK


def _list(value: Optional[Sequence[Any]], default: Sequence[Any]) -> List[Any]:
    return list(value) if value else list(default)


def command_sweep(args: argparse.Namespace) -> int:
    values = settings(args)
    template = make_config(values)
    return sweep_exit(
        sweep(
            template,
            _list(args.dataset, [template.dataset]),
            _list(args.remap, REMAP_NAMES),
            _list(values.get("seeds"), DEFAULT_SEEDS),
            values.get("workers", 1),
        )
    )


def command_compare(args: argparse.Namespace) -> int:
    values = settings(args)
    return sweep_exit(
        compare(
            make_config(values),
            _list(values.get("seeds"), DEFAULT_SEEDS),
            values.get("workers", 1),
        )
    )


def command_report(args: argparse.Namespace) -> int:
    for path in report(args.out, args.k, args.anchor):
        print(path)
    return EXIT_OK


def command_anova(args: argparse.Namespace) -> int:
    records = read_records(args.out)
    if not records:
        raise ConfigurationError(f"No finished runs in {args.out}")
    for name, group in by_setting(records.values()).items():
        print(f"# {name}")
        print(anova_table(group).to_csv(index=False), end="")
    return EXIT_OK


def command_plot(args: argparse.Namespace) -> int:
    for path in plot(args.out, args.top):
        print(path)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "run": command_run,
    "sweep": command_sweep,
    "compare": command_compare,
    "report": command_report,
    "anova": command_anova,
    "plot": command_plot,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except VqcError as exc:
        print(f"{PROG}: {args.command}: {exc.message}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, ConfigurationError) else EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
