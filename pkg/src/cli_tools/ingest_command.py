"""``lesionfuse ingest``: map a lesion CSV into annotation JSONL."""

import argparse
from pathlib import Path

from cli_tools.csv_adapter import ingest_generic_csv, parse_mapping
from cli_tools.records import write_records
from core.config import get_config
from core.registry import CommandResult, cli


def _configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("csv", type=Path, help="Input CSV with a header row")
    parser.add_argument(
        "--map",
        dest="mapping",
        action="append",
        default=[],
        required=True,
        metavar="FIELD=COLUMN",
        help="Map a record field (or packed box/recist/spacing) to a CSV column; repeatable",
    )
    parser.add_argument("--out", type=Path, required=True, help="Annotation JSONL")
    parser.add_argument(
        "--spacing", type=float, default=None, help="Pixel spacing (mm/px) for rows without one"
    )
    parser.add_argument(
        "--recist-pad",
        type=float,
        default=None,
        help="Padding in pixels around RECIST endpoints for rows without a box (default from config)",
    )
    parser.add_argument(
        "--strict", action="store_true", help="Fail on the first invalid row instead of skipping it"
    )


@cli.command("ingest", help="Convert a CSV of lesion annotations to JSONL", configure=_configure)
def cmd_ingest(args: argparse.Namespace) -> CommandResult:
    pad = args.recist_pad if args.recist_pad is not None else get_config().prep.recist_pad_px
    result = ingest_generic_csv(
        args.csv,
        parse_mapping(args.mapping),
        strict=args.strict,
        default_spacing=args.spacing,
        recist_pad_px=pad,
    )
    write_records(result.records, args.out)
    return CommandResult(
        success=True,
        message=f"Wrote {len(result.records)} records to {args.out}, skipped {len(result.rejected)}",
        data={"records": len(result.records), "rejected": result.rejected},
    )
