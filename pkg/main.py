"""Command-line entry point for R-Trans."""

from argparse import ArgumentParser
from pathlib import Path
from typing import List, Optional
import json
import logging
import sys

from config import settings
from commands import (
    add_shared_arguments,
    cmd_eval,
    cmd_gradcheck,
    cmd_ingest,
    cmd_report,
    cmd_train,
    resolve_run_config,
    run_context,
)
from errors import RTransError

# Import monitoring
from monitoring.sentry_config import init_sentry, capture_exception

logger = logging.getLogger(__name__)


def build_parser() -> ArgumentParser:
    shared = ArgumentParser(add_help=False)
    add_shared_arguments(shared)

    parser = ArgumentParser(
        prog="rtrans",
        description="Recurrent transformer surgical skill assessment on JIGSAWS kinematics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("ingest", parents=[shared], help="validate the dataset and write a manifest")
    sub.add_parser("train", parents=[shared], help="train one model per fold")
    sub.add_parser("eval", parents=[shared], help="cross-validate and write result tables")

    report = sub.add_parser("report", parents=[shared], help="write per-trial feedback timelines")
    report.add_argument("--trial", default=None, help="restrict to one trial id")
    report.add_argument(
        "--flip-rate", dest="flip_rate", type=float, default=None,
        help="also write a blinded copy with this fraction of bands replaced",
    )

    gradcheck = sub.add_parser("gradcheck", parents=[shared], help="finite-difference gradient check")
    gradcheck.add_argument("--threshold", type=float, default=1e-3)
    gradcheck.add_argument("--dump-tape", dest="dump_tape", type=Path, default=None)
    return parser


def configure_logging() -> None:
    """Log to stdout; stderr carries only the one-line JSON error of a failed command."""
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stdout,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging()
    init_sentry()

    run = None
    try:
        run, _ = resolve_run_config(args)
        logger.info(f"Running {args.command}")

        if args.command == "ingest":
            cmd_ingest(run)
        elif args.command == "train":
            cmd_train(run)
        elif args.command == "eval":
            cmd_eval(run)
        elif args.command == "report":
            cmd_report(run, trial_id=args.trial, flip_rate=args.flip_rate)
        elif args.command == "gradcheck":
            return cmd_gradcheck(threshold=args.threshold, dump_tape=args.dump_tape, seed=run.seed)
        return 0

    except RTransError as e:
        logger.error(f"{args.command} failed: {str(e)}")
        capture_exception(e, context=run_context(args.command, run))
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return 1
    except Exception as e:
        logger.error(f"Unhandled exception: {str(e)}", exc_info=True)
        capture_exception(e, context=run_context(args.command, run))
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
