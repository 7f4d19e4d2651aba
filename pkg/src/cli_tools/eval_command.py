"""``lesionfuse eval``: score detections against ground truth."""

import argparse
from pathlib import Path
from typing import List

from boxcore.models import Detection, LesionAnnotation
from cli_tools.records import read_annotations, read_detections, read_manifest
from cli_tools.reports import (
    ReportDocument,
    config_echo,
    render_table,
    table_frame,
    write_froc_csv,
    write_json,
    write_table_csv,
)
from core.config import get_config
from core.registry import CommandResult, cli
from evaluation.models import EvaluationConfig
from evaluation.stratify import evaluate, stratified_report


def parse_targets(text: str) -> List[float]:
    """Comma-separated FP/image targets, e.g. ``0.5,1,2,4``."""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid FP targets {text!r}") from e


def _configure(parser: argparse.ArgumentParser) -> None:
    defaults = get_config().evaluation
    parser.add_argument("detections", type=Path, help="Detection JSONL")
    parser.add_argument("annotations", type=Path, help="Ground-truth annotation JSONL")
    parser.add_argument("--match-iou", type=float, default=defaults.match_iou)
    parser.add_argument(
        "--fp-targets",
        type=parse_targets,
        default=list(defaults.fp_targets),
        help="Comma-separated FP/image targets (default: 0.5,1,2,4,6,8,16)",
    )
    parser.add_argument(
        "--stratify", action="store_true", help="Add SAD<10mm, 10mm–30mm and SAD≥30mm rows"
    )
    parser.add_argument(
        "--spacing",
        type=float,
        default=None,
        help="Pixel spacing (mm/px) for annotations without sad_mm or spacing_mm_px",
    )
    parser.add_argument(
        "--manifest", type=Path, default=None, help="JSONL listing every evaluated image"
    )
    parser.add_argument("--method-name", default=defaults.method_name, help="Row label")
    parser.add_argument("--out-json", type=Path, default=None)
    parser.add_argument("--out-csv", type=Path, default=None)
    parser.add_argument("--out-froc", type=Path, default=None)


@cli.command("eval", help="Evaluate detections: mAP, FROC sensitivities, size strata", configure=_configure)
def cmd_eval(args: argparse.Namespace) -> CommandResult:
    """Evaluate one detection file and print the report table to stdout."""
    cfg = EvaluationConfig(
        match_iou=args.match_iou,
        fp_targets=tuple(args.fp_targets),
        method_name=args.method_name,
    )
    dets: List[Detection] = read_detections(args.detections)
    gts: List[LesionAnnotation] = read_annotations(args.annotations, default_spacing=args.spacing)
    image_ids = read_manifest(args.manifest) if args.manifest else None

    if args.stratify:
        report = stratified_report(dets, gts, args.spacing, cfg, image_ids)
    else:
        report = evaluate(dets, gts, cfg, image_ids)

    document = ReportDocument(
        config=config_echo(
            detections=args.detections,
            annotations=args.annotations,
            match_iou=cfg.match_iou,
            fp_targets=list(cfg.fp_targets),
            stratify=args.stratify,
            spacing=args.spacing,
            manifest=args.manifest,
        ),
        report=report,
    )
    frame = table_frame([report])
    if args.out_json:
        write_json(document, args.out_json)
    if args.out_csv:
        write_table_csv(frame, args.out_csv)
    if args.out_froc and report.curve is not None:
        write_froc_csv(report.curve, args.out_froc)

    print(render_table(frame))
    return CommandResult(
        success=True,
        message=(
            f"{report.method}: mAP={report.mean_ap:.4f} over {report.n_images} images, "
            f"{report.n_annotations} lesions"
        ),
        data=document.model_dump(mode="json"),
    )
