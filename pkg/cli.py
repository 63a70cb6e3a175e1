# File: dsqi_bench/cli.py
"""Command-line front end: synth, train, run, eval and compare"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from core.exceptions import DsqiError, UsageError
from facade import (
    DsqiPipeline,
    REST_FILE,
    STREAM_FILE,
    TIMELINE_FILE,
    TRAINING_FEATURES_FILE,
)
from parsers.config_parser import ConfigLoader
from parsers.stream_reader import read_stream_csv, read_timeline_csv
from writers.model_store import load_models

logger = logging.getLogger("dsqi")

OUTPUT_DIR_ENV = "DSQI_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "dsqi_out"


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR


class _ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser raising UsageError so bad flags share the usage exit code"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one configuration key (repeatable)")
    common.add_argument("--out", default=None, help=f"output directory (default ${OUTPUT_DIR_ENV} or {DEFAULT_OUTPUT_DIR})")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress")
    common.add_argument("--debug", action="store_true", help="log debugging detail")

    parser = _ArgumentParser(prog="dsqi", description="Decision-stream quality improvement benchmark")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    synth = commands.add_parser("synth", parents=[common], help="generate a trial and training material")
    synth.add_argument("--seed", type=int, help="shortcut for --set synth.seed=N")
    synth.add_argument("--classes", type=int, help="shortcut for --set synth.n_classes=K")
    synth.add_argument("--emg", action="store_true", help="write raw signals instead of a confidence stream")

    train = commands.add_parser("train", parents=[common], help="train classifiers from features or a signal")
    train.add_argument("--features", help="labeled features CSV (label,x_1..x_d)")
    train.add_argument("--rest", help="rest amplitude CSV (mean_mav) for the onset threshold")
    train.add_argument("--signal", help="training recording (.npy)")
    train.add_argument("--labels", help="per-sample labels of the training recording (.npy)")
    train.add_argument("--classes", type=int, help="expected class count")

    run = commands.add_parser("run", parents=[common], help="run schemes over a decision stream")
    run.add_argument("--stream", help="confidence-stream CSV")
    run.add_argument("--signal", help="raw recording (.npy) classified with the trained bank")
    run.add_argument("--timeline", help="timeline CSV providing true classes for a raw recording")
    run.add_argument("--models", help="directory of trained models")
    run.add_argument("--schemes", help="comma-separated scheme names (default [run] schemes)")

    ev = commands.add_parser("eval", parents=[common], help="compute metrics of processed streams")
    ev.add_argument("processed", nargs="+", help="processed CSV files, one per scheme")
    ev.add_argument("--timeline", required=True, help="timeline CSV")
    ev.add_argument("--plot", action="store_true", default=None, help="write one SVG per scheme")

    compare = commands.add_parser("compare", parents=[common], help="run and evaluate schemes in one go")
    compare.add_argument("--stream", help="confidence-stream CSV (default <out>/stream.csv)")
    compare.add_argument("--timeline", help="timeline CSV (default <out>/timeline.csv)")
    compare.add_argument("--models", help="directory of trained models")
    compare.add_argument("--schemes", help="comma-separated scheme names (default [run] schemes)")
    return parser


def configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.debug else logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def cmd_synth(pipeline: DsqiPipeline, args: argparse.Namespace, out_dir: str) -> int:
    cfg = pipeline.loader.generator_config(seed=args.seed, n_classes=args.classes)
    summary = pipeline.synthesize(cfg, out_dir, emg=args.emg)
    print(f"frames={summary['frames']} steady_segments={summary['steady_segments']} "
          f"transitions={summary['transitions']}")
    return 0


def cmd_train(pipeline: DsqiPipeline, args: argparse.Namespace, out_dir: str) -> int:
    features = args.features
    rest = args.rest
    if features is None and args.signal is None:
        features = str(Path(out_dir) / TRAINING_FEATURES_FILE)
        rest = rest or str(Path(out_dir) / REST_FILE)
    models = pipeline.train(out_dir, features_path=features, rest_path=rest, signal_path=args.signal,
                            labels_path=args.labels, n_classes=args.classes)
    print(f"classes={models.gaussian.n_classes} occ_models={len(models.occ)} "
          f"bank_lengths={len(models.bank.entries) if models.bank else 0}")
    return 0


def cmd_run(pipeline: DsqiPipeline, args: argparse.Namespace, out_dir: str) -> int:
    schemes = pipeline.loader.schemes(args.schemes)
    stream = args.stream
    if stream is None and args.signal is None:
        stream = str(Path(out_dir) / STREAM_FILE)
    written = pipeline.run_files(out_dir, schemes, stream_path=stream, signal_path=args.signal,
                                 models_dir=args.models, timeline_path=args.timeline,
                                 skip_unavailable=args.schemes is None)
    for scheme, path in written.items():
        print(f"{scheme}: {path}")
    return 0


def cmd_eval(pipeline: DsqiPipeline, args: argparse.Namespace, out_dir: str) -> int:
    plot = args.plot if args.plot is not None else pipeline.loader.get_bool("eval", "plot")
    summary = pipeline.evaluate_files(args.processed, args.timeline, out_dir, plot=plot)
    print(summary.to_string(index=False))
    return 0


def cmd_compare(pipeline: DsqiPipeline, args: argparse.Namespace, out_dir: str) -> int:
    schemes = pipeline.loader.schemes(args.schemes)
    stream = read_stream_csv(args.stream or str(Path(out_dir) / STREAM_FILE),
                             generative=pipeline.classifier_kind == "generative")
    timeline = read_timeline_csv(args.timeline or str(Path(out_dir) / TIMELINE_FILE))
    models = load_models(args.models) if args.models else None
    summary = pipeline.compare(stream, timeline, schemes, models, out_dir=out_dir,
                               skip_unavailable=args.schemes is None)
    print(summary.to_string(index=False))
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "run": cmd_run,
    "eval": cmd_eval,
    "compare": cmd_compare,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code"""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return e.exit_code
    configure_logging(args)
    out_dir = args.out or default_output_dir()
    try:
        pipeline = DsqiPipeline(ConfigLoader(args.config, args.overrides))
        return COMMANDS[args.command](pipeline, args, out_dir)
    except DsqiError as e:
        logger.error("%s", e)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
