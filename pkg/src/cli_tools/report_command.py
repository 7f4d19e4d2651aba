"""``lesionfuse report`` and ``lesionfuse experiment``: comparison tables."""

import argparse
import json
from pathlib import Path

from cli_tools.reports import (
    ExperimentDocument,
    load_report_document,
    render_table,
    report_schema,
    table_frame,
    write_json,
    write_table_csv,
)
from cli_tools.simulate_command import load_simulation_config
from core.errors import InputValidationError
from core.registry import CommandResult, cli
from simlab.experiment import ensemble_experiment


def _configure_report(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("reports", nargs="*", type=Path, help="JSON reports written by eval")
    parser.add_argument("--out-csv", type=Path, default=None)
    parser.add_argument("--no-bins", action="store_true", help="Leave out size-bin rows")
    parser.add_argument(
        "--schema-out", type=Path, default=None, help="Write the JSON Schema of report documents"
    )


@cli.command("report", help="Stack saved evaluation reports into one table", configure=_configure_report)
def cmd_report(args: argparse.Namespace) -> CommandResult:
    if not args.reports and not args.schema_out:
        raise InputValidationError("give at least one report or --schema-out")

    if args.schema_out:
        args.schema_out.parent.mkdir(parents=True, exist_ok=True)
        args.schema_out.write_text(json.dumps(report_schema(), indent=2) + "\n", encoding="utf-8")

    if not args.reports:
        return CommandResult(success=True, message=f"Wrote schema to {args.schema_out}")

    documents = [load_report_document(path) for path in args.reports]
    targets = {tuple(doc.report.fp_targets) for doc in documents}
    if len(targets) > 1:
        raise InputValidationError(f"reports use different FP targets: {sorted(targets)}")

    frame = table_frame([doc.report for doc in documents], include_bins=not args.no_bins)
    if args.out_csv:
        write_table_csv(frame, args.out_csv)
    print(render_table(frame))
    return CommandResult(success=True, message=f"Stacked {len(documents)} reports")


def _configure_experiment(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", type=Path, help="Simulation config JSON (two or more detectors)")
    parser.add_argument("--seed", type=int, default=None, help="Override scene.seed")
    parser.add_argument("--out-json", type=Path, default=None)
    parser.add_argument("--out-csv", type=Path, default=None)
    parser.add_argument("--no-bins", action="store_true", help="Leave out size-bin rows")


@cli.command(
    "experiment",
    help="Compare simulated detectors, pooled NMS and their fused ensemble",
    configure=_configure_experiment,
)
def cmd_experiment(args: argparse.Namespace) -> CommandResult:
    config = load_simulation_config(args.config, args.seed)
    result = ensemble_experiment(
        config.scene, config.detectors, config.fusion, config.evaluation, threads=args.threads
    )
    frame = table_frame(result.rows(), include_bins=not args.no_bins)
    if args.out_json:
        write_json(ExperimentDocument(experiment=result), args.out_json)
    if args.out_csv:
        write_table_csv(frame, args.out_csv)
    print(render_table(frame))
    return CommandResult(
        success=True,
        message=(
            f"Ensemble mAP {result.fused.mean_ap:.4f} vs best single "
            f"{max(r.mean_ap for r in result.individual):.4f}"
        ),
    )
