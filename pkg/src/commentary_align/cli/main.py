"""
Command-line entry point: `commentary-align <command> ...`.

Commands:
    synth OUT_DIR                   Generate a synthetic dataset.
    train DATA_DIR --out DIR        Train projection heads on the train split.
    align MATCH CHECKPOINT --out F  Coarse-to-fine realignment of one match file.
    eval ALIGNED                    Print the offset statistics table.
    report ALIGNED --out DIR        Write the table and the offset histogram CSV.
    ablate DATA_DIR CHECKPOINT      Compare the four stage combinations on a split.

Every command accepts `--config`, `--seed`, `--log-level`, `--log-file` and
`--json`. Exit codes: 0 success, 1 usage, 2 data error, 3 endpoint error.
"""

import argparse
import json
import os
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from commentary_align import __version__
from commentary_align.aligner.training import train
from commentary_align.cli.config import RunConfig, check_windows, resolve_config, write_run_manifest
from commentary_align.coarse.llm import ENV_KEY, LlmEndpointConfig
from commentary_align.core.errors import EXIT_USAGE, UsageError
from commentary_align.core.io import load_match
from commentary_align.core.logging import configure_logging, get_logger
from commentary_align.core.metrics import (
    compute_offset_stats,
    render_comparison,
    render_report,
    write_histogram_csv,
)
from commentary_align.decorators.safe_execute import safe_execute
from commentary_align.numerics.checkpoint import checkpoint_id, load_checkpoint
from commentary_align.realign.pipeline import pipeline_align, run_ablation, write_aligned_match
from commentary_align.synth.dataset import load_split, write_dataset

logger = get_logger(__name__)

CHECKPOINT_NAME = "heads.mtac"
LOSS_TRACE_NAME = "loss_trace.csv"
REPORT_NAME = "report.txt"
HISTOGRAM_NAME = "histogram.csv"


class CommandParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message: str) -> None:
        raise UsageError(message)


def _windows(text: str) -> tuple[float, ...]:
    try:
        windows = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid window list {text!r}") from exc
    if not windows:
        raise argparse.ArgumentTypeError("at least one window is required")
    try:
        return check_windows(windows)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> CommandParser:
    common = CommandParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML config file or run manifest")
    common.add_argument("--seed", type=int, help="master seed for synth and train")
    common.add_argument(
        "--log-level",
        default="INFO",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
    )
    common.add_argument("--log-file", type=Path)
    common.add_argument("--json", action="store_true", help="print the result payload as JSON")

    parser = CommandParser(
        prog="commentary-align",
        description="Realign timestamped match commentaries to video key frames.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=CommandParser)

    synth = commands.add_parser("synth", parents=[common], help="generate a synthetic dataset")
    synth.add_argument("out_dir", type=Path)
    synth.add_argument("--num-matches", type=int)
    synth.add_argument("--val-matches", type=int)
    synth.add_argument("--test-matches", type=int)
    synth.add_argument("--commentaries", type=int, dest="commentaries_per_match")
    synth.add_argument("--duration-s", type=float)
    synth.add_argument("--dim", type=int, dest="d")
    synth.add_argument("--noise-sigma", type=float)
    synth.add_argument("--replay-prob", type=float)
    synth.add_argument("--offset-sigma-s", type=float)
    synth.add_argument("--filler-per-min", type=float)
    synth.add_argument("--workers", type=int, default=1)

    train_cmd = commands.add_parser("train", parents=[common], help="train projection heads")
    train_cmd.add_argument("data_dir", type=Path)
    train_cmd.add_argument("--out", type=Path, required=True, help="output directory")
    train_cmd.add_argument("--epochs", type=int)
    train_cmd.add_argument("--lr", type=float)
    train_cmd.add_argument("--hidden-dim", type=int)
    train_cmd.add_argument("--out-dim", type=int)
    train_cmd.add_argument("--progress", action="store_true", default=None, dest="show_progress")

    align = commands.add_parser("align", parents=[common], help="realign one match file")
    align.add_argument("match_file", type=Path)
    align.add_argument("checkpoint", type=Path)
    align.add_argument("--out", type=Path, required=True, help="aligned match file to write")
    align.add_argument("--coarse-mode", choices=["llm", "lexical", "off"])
    align.add_argument("--before-s", type=float)
    align.add_argument("--after-s", type=float)
    align.add_argument("--tau", type=float)
    align.add_argument("--llm-url", help="endpoint URL (default: $ALIGN_LLM_URL)")

    evaluate = commands.add_parser("eval", parents=[common], help="print offset statistics")
    evaluate.add_argument("aligned_file", type=Path)
    evaluate.add_argument("--windows", type=_windows)

    report = commands.add_parser("report", parents=[common], help="write table and histogram")
    report.add_argument("aligned_file", type=Path)
    report.add_argument("--out", type=Path, required=True, help="output directory")
    report.add_argument("--windows", type=_windows)
    report.add_argument("--bin-s", type=float, dest="histogram_bin_s")

    ablate = commands.add_parser("ablate", parents=[common], help="compare stage combinations")
    ablate.add_argument("data_dir", type=Path)
    ablate.add_argument("checkpoint", type=Path)
    ablate.add_argument("--split", choices=["train", "val", "test"], default="test")
    ablate.add_argument("--coarse-mode", choices=["llm", "lexical", "off"])
    ablate.add_argument("--windows", type=_windows)
    return parser


def _flag(args: argparse.Namespace, name: str) -> Any:
    return getattr(args, name, None)


def overrides_from_args(args: argparse.Namespace) -> dict[str, Any]:
    """Settings given on the command line, nested like RunConfig."""
    return {
        "seed": args.seed,
        "windows": _flag(args, "windows"),
        "histogram_bin_s": _flag(args, "histogram_bin_s"),
        "synth": {
            name: _flag(args, name)
            for name in (
                "num_matches",
                "val_matches",
                "test_matches",
                "commentaries_per_match",
                "duration_s",
                "d",
                "noise_sigma",
                "replay_prob",
                "offset_sigma_s",
                "filler_per_min",
            )
        },
        "train": {
            name: _flag(args, name)
            for name in ("epochs", "lr", "hidden_dim", "out_dim", "show_progress")
        },
        "realign": {"before_s": _flag(args, "before_s"), "after_s": _flag(args, "after_s")},
        "coarse": {"mode": _flag(args, "coarse_mode"), "tau": _flag(args, "tau")},
    }


def _endpoint(config: RunConfig, url: str | None) -> RunConfig:
    """Attach the LLM endpoint for llm coarse mode.

    Raises:
        EndpointError: If no URL is given by flag, config file or environment.
    """
    if config.coarse.mode != "llm":
        return config
    endpoint = config.coarse.endpoint
    if url or endpoint is None:
        overrides = endpoint.model_dump(exclude={"base_url"}) if endpoint else {}
        endpoint = LlmEndpointConfig.from_env(base_url=url, **overrides)
    elif endpoint.api_key is None and os.environ.get(ENV_KEY):
        endpoint = endpoint.model_copy(update={"api_key": os.environ[ENV_KEY]})
    return config.model_copy(update={"coarse": config.coarse.model_copy(update={"endpoint": endpoint})})


@safe_execute
def cmd_synth(args: argparse.Namespace, config: RunConfig) -> dict[str, Any]:
    manifest = write_dataset(args.out_dir, config.synth, workers=args.workers)
    write_run_manifest(args.out_dir, "synth", config, [args.out_dir])
    return {"manifest": str(manifest), "num_matches": config.synth.num_matches}


@safe_execute
def cmd_train(args: argparse.Namespace, config: RunConfig) -> dict[str, Any]:
    dataset = load_split(args.data_dir, "train")
    if not dataset:
        raise UsageError(f"dataset {args.data_dir} has no training matches")
    checkpoint = args.out / CHECKPOINT_NAME
    train_config = config.train.model_copy(
        update={"checkpoint_path": checkpoint, "loss_trace_path": args.out / LOSS_TRACE_NAME}
    )
    result = train(dataset, train_config)
    write_run_manifest(args.out, "train", config, [args.data_dir, "--out", args.out])
    return {
        "checkpoint": str(checkpoint),
        "checkpoint_id": checkpoint_id(checkpoint),
        "final_loss": result.loss_trace[-1],
        "batches_per_epoch": result.num_batches,
    }


@safe_execute
def cmd_align(args: argparse.Namespace, config: RunConfig) -> dict[str, Any]:
    config = _endpoint(config, args.llm_url)
    match = load_match(args.match_file)
    heads = load_checkpoint(args.checkpoint)
    report = pipeline_align(match, heads, config.coarse, config.realign, windows=config.windows)
    out = write_aligned_match(
        match, report, args.out, checkpoint=checkpoint_id(args.checkpoint), coarse_cfg=config.coarse
    )
    write_run_manifest(
        args.out.parent, "align", config, [args.match_file, args.checkpoint, "--out", args.out]
    )
    result: dict[str, Any] = {"aligned_file": str(out), "coarse": report.coarse_mode}
    if report.stats is not None:
        result["avg_abs_delta"] = report.stats.avg_abs_delta
    return result


def _aligned_stats(path: Path, config: RunConfig):
    match = load_match(path)
    return compute_offset_stats(match.aligned_times(), match.ground_truth_times(), config.windows)


@safe_execute
def cmd_eval(args: argparse.Namespace, config: RunConfig) -> dict[str, Any]:
    stats = _aligned_stats(args.aligned_file, config)
    table = render_report(stats, config.histogram_bin_s).table
    if not args.json:
        sys.stdout.write(table)
    return {
        "avg_delta": stats.avg_delta,
        "avg_abs_delta": stats.avg_abs_delta,
        "window_coverage": {f"{w:g}": pct for w, pct in stats.window_coverage.items()},
    }


@safe_execute
def cmd_report(args: argparse.Namespace, config: RunConfig) -> dict[str, Any]:
    stats = _aligned_stats(args.aligned_file, config)
    report = render_report(stats, config.histogram_bin_s)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / REPORT_NAME).write_text(report.table, encoding="utf-8")
    write_histogram_csv(report.histogram, args.out / HISTOGRAM_NAME)
    write_run_manifest(args.out, "report", config, [args.aligned_file, "--out", args.out])
    if not args.json:
        sys.stdout.write(report.table)
    return {"report": str(args.out / REPORT_NAME), "histogram": str(args.out / HISTOGRAM_NAME)}


@safe_execute
def cmd_ablate(args: argparse.Namespace, config: RunConfig) -> dict[str, Any]:
    config = _endpoint(config, None)
    matches = load_split(args.data_dir, args.split)
    if not matches:
        raise UsageError(f"split {args.split!r} of {args.data_dir} is empty")
    heads = load_checkpoint(args.checkpoint)
    columns = run_ablation(matches, heads, config.coarse, config.realign, config.windows)
    if not args.json:
        sys.stdout.write(render_comparison(columns))
    return {
        name: {"avg_abs_delta": stats.avg_abs_delta, "k": stats.k}
        for name, stats in columns.items()
    }


COMMANDS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "align": cmd_align,
    "eval": cmd_eval,
    "report": cmd_report,
    "ablate": cmd_ablate,
}


@safe_execute
def _resolve(args: argparse.Namespace) -> RunConfig:
    return resolve_config(args.config, overrides_from_args(args))


def main(argv: Sequence[str] | None = None) -> int:
    """Run one command and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"commentary-align: error: {exc}\n")
        return EXIT_USAGE

    configure_logging(level=args.log_level, log_file=args.log_file, force_reconfigure=True)

    resolved = _resolve(args)
    payload = COMMANDS[args.command](args, resolved["result"]) if resolved["status"] else resolved

    if args.json:
        sys.stdout.write(json.dumps(payload, default=str, indent=2) + "\n")
    elif not payload["status"]:
        sys.stderr.write(f"commentary-align: {payload['error']['message']}\n")
    return payload["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
