"""``lesionfuse fuse``: combine detection files into one.

Every (model, epoch) tag found in the inputs is one source run. A tag may
appear in only one input file.
"""

import argparse
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from boxcore.models import Detection
from cli_tools.records import read_detections, read_many, write_detections
from core.config import get_config
from core.errors import InputValidationError
from core.registry import CommandResult, cli
from fusion.ensemble import fuse_runs, fuse_two_stage, nms_runs
from fusion.models import DetectionRun, FusionConfig, RescaleMode

SourceTag = Tuple[str, Optional[int]]


def parse_weights(items: Sequence[str]) -> Dict[str, float]:
    """``model=weight`` items to a weight mapping."""
    weights: Dict[str, float] = {}
    for item in items:
        model, sep, value = item.rpartition("=")
        if not sep or not model:
            raise InputValidationError(f"weights must look like model=weight, got {item!r}")
        try:
            weights[model] = float(value)
        except ValueError as e:
            raise InputValidationError(f"weight for {model!r} is not a number: {value!r}") from e
    return weights


def collect_runs(paths: Sequence[Path], per_file: Sequence[List[Detection]]) -> List[DetectionRun]:
    """Split each file into runs by source tag, in file order.

    Raises:
        InputValidationError: if the same tag appears in two files.
    """
    owner: Dict[SourceTag, Path] = {}
    runs: List[DetectionRun] = []
    for path, dets in zip(paths, per_file):
        by_tag: Dict[SourceTag, List[Detection]] = {}
        for det in dets:
            by_tag.setdefault(det.source, []).append(det)
        for tag in sorted(by_tag, key=lambda t: (t[0], -1 if t[1] is None else t[1])):
            if tag in owner:
                model, epoch = tag
                raise InputValidationError(
                    f"duplicate source tag {model}@{'-' if epoch is None else epoch} "
                    f"in {owner[tag]} and {path}"
                )
            owner[tag] = path
            model, epoch = tag
            runs.append(DetectionRun(source_model=model, source_epoch=epoch, detections=by_tag[tag]))
    return runs


def _configure(parser: argparse.ArgumentParser) -> None:
    defaults = get_config().fusion
    parser.add_argument("inputs", nargs="+", type=Path, help="Detection JSONL files")
    parser.add_argument("--out", type=Path, required=True, help="Fused detection JSONL")
    parser.add_argument("--iou-thresh", type=float, default=defaults.iou_thresh)
    parser.add_argument("--score-thresh", type=float, default=defaults.score_thresh)
    parser.add_argument(
        "--weights",
        action="append",
        default=[],
        metavar="MODEL=W",
        help="Weight of one model; repeatable",
    )
    parser.add_argument(
        "--rescale", choices=[m.value for m in RescaleMode], default=defaults.rescale
    )
    parser.add_argument(
        "--n-sources", type=int, default=None, help="N for rescaling (default: number of runs)"
    )
    parser.add_argument("--method", choices=["wbf", "nms"], default="wbf")
    parser.add_argument(
        "--two-stage",
        action="store_true",
        help="Fuse the epochs of each model first, then the models",
    )
    parser.add_argument("--fused-name", default=defaults.fused_model_name)


@cli.command("fuse", help="Fuse detection runs with weighted boxes fusion", configure=_configure)
def cmd_fuse(args: argparse.Namespace) -> CommandResult:
    """Fuse detection JSONL files into one deterministic JSONL file."""
    cfg = FusionConfig(
        iou_thresh=args.iou_thresh,
        score_thresh=args.score_thresh,
        model_weights=parse_weights(args.weights),
        rescale_mode=RescaleMode(args.rescale),
        n_sources=args.n_sources,
        fused_model_name=args.fused_name,
    )
    per_file = read_many(args.inputs, read_detections, args.threads)
    runs = collect_runs(args.inputs, per_file)
    n_in = sum(len(run.detections) for run in runs)

    if not runs:
        fused: List[Detection] = []
    elif args.method == "nms":
        fused = nms_runs(runs, cfg.iou_thresh, args.threads)
    elif args.two_stage:
        fused = fuse_two_stage(runs, cfg, threads=args.threads)
    else:
        fused = fuse_runs(runs, cfg, args.threads)

    write_detections(fused, args.out)
    logger.debug(f"Fusion config: {cfg.model_dump_json()}")
    return CommandResult(
        success=True,
        message=f"Wrote {len(fused)} detections from {n_in} across {len(runs)} runs to {args.out}",
        data={"runs": len(runs), "inputs": n_in, "outputs": len(fused), "out": str(args.out)},
    )
