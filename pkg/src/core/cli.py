"""LesionFuse command line.

Usage:
    lesionfuse fuse runs/*.jsonl --out fused.jsonl
    lesionfuse eval fused.jsonl gt.jsonl --stratify --out-json report.json
    python -m core.cli --version
"""

import argparse
import sys
from typing import List, Optional

from loguru import logger

from core import FORMAT_VERSION, __version__
from core.config import get_config
from core.logging_config import setup_logging
from core.registry import EXIT_INPUT_ERROR, EXIT_OK, CommandResult, cli

# =============================================================================
# Import commands (registers them with the registry via @cli.command)
# =============================================================================

import cli_tools.fuse_command  # noqa: F401, E402 - registers fuse
import cli_tools.eval_command  # noqa: F401, E402 - registers eval
import cli_tools.simulate_command  # noqa: F401, E402 - registers simulate
import cli_tools.preprocess_command  # noqa: F401, E402 - registers preprocess
import cli_tools.ingest_command  # noqa: F401, E402 - registers ingest
import cli_tools.report_command  # noqa: F401, E402 - registers report, experiment


def version_string() -> str:
    return f"lesionfuse {__version__} (format {FORMAT_VERSION})"


def build_parser() -> argparse.ArgumentParser:
    """Root parser with global flags and one subparser per registered command."""
    config = get_config()
    parser = argparse.ArgumentParser(
        prog="lesionfuse",
        description="Fuse, evaluate and simulate lesion detections; prepare CT slices.",
    )
    parser.add_argument("--version", action="version", version=version_string())
    parser.add_argument(
        "--log-level",
        default=config.logging.level,
        help=f"Logging level for stderr (default: {config.logging.level})",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Shortcut for --log-level DEBUG"
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=config.threads,
        help=f"Worker threads (default: {config.threads}, env LESIONFUSE_THREADS)",
    )
    cli.add_subparsers(parser)
    return parser


def run(argv: Optional[List[str]] = None) -> CommandResult:
    """Parse arguments and run one subcommand."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        code = e.code if isinstance(e.code, int) else EXIT_INPUT_ERROR
        return CommandResult(success=code == EXIT_OK, message="", exit_code=code)

    config = get_config()
    setup_logging(
        level="DEBUG" if args.verbose else args.log_level.upper(),
        log_file=config.logging.log_file,
        rotation=config.logging.rotation,
        retention=config.logging.retention,
    )
    if args.threads < 1:
        return CommandResult(
            success=False, message="--threads must be >= 1", exit_code=EXIT_INPUT_ERROR
        )

    result = cli.dispatch(args)
    if result.success:
        logger.info(f"{args.command}: {result.message}")
    else:
        print(f"lesionfuse {args.command}: error: {result.message}", file=sys.stderr)
    return result


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    return run(argv).exit_code


if __name__ == "__main__":
    sys.exit(main())
