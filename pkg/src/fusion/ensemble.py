"""Combine whole detection runs (epochs, models) into one detection set."""

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

from loguru import logger

from boxcore.models import Detection
from core.errors import InputValidationError
from fusion.models import DetectionRun, FusionConfig
from fusion.nms import nms
from fusion.wbf import group_by_image, weighted_boxes_fusion


def _check_runs(runs: Sequence[DetectionRun]) -> None:
    if not runs:
        raise InputValidationError("at least one detection run is required")
    counts = Counter(run.tag for run in runs)
    duplicates = [tag for tag, n in counts.items() if n > 1]
    if duplicates:
        shown = ", ".join(f"{m}@{'-' if e is None else e}" for m, e in sorted(duplicates, key=str))
        raise InputValidationError(f"duplicate source tags: {shown}")


def _tagged(run: DetectionRun) -> List[Detection]:
    """Detections of a run carrying the run's (model, epoch) tag."""
    out = []
    for det in run.detections:
        if det.source != run.tag:
            det = det.model_copy(
                update={"source_model": run.source_model, "source_epoch": run.source_epoch}
            )
        out.append(det)
    return out


def _per_image(
    dets: List[Detection],
    fn: Callable[[List[Detection]], List[Detection]],
    threads: int,
) -> List[Detection]:
    groups = group_by_image(dets)
    image_ids = sorted(groups)
    if threads > 1 and len(image_ids) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            # map preserves image_id order regardless of completion order
            results = list(pool.map(lambda image_id: fn(groups[image_id]), image_ids))
    else:
        results = [fn(groups[image_id]) for image_id in image_ids]
    return [det for chunk in results for det in chunk]


def fuse_runs(
    runs: Sequence[DetectionRun],
    cfg: FusionConfig,
    threads: int = 1,
) -> List[Detection]:
    """Fuse several runs image by image with weighted boxes fusion.

    N (``n_sources``) defaults to the number of runs and the ensemble whose mean
    weight normalizes scores defaults to the runs' models. Output is ordered by image_id,
    then by descending fused score.

    Raises:
        InputValidationError: if no runs are given or two runs share a tag.
    """
    _check_runs(runs)
    if cfg.n_sources is None:
        cfg = cfg.model_copy(update={"n_sources": len(runs)})
    if not cfg.ensemble_models:
        cfg = cfg.model_copy(
            update={"ensemble_models": tuple(sorted({run.source_model for run in runs}))}
        )
    pooled = [det for run in runs for det in _tagged(run)]
    fused = _per_image(pooled, lambda group: weighted_boxes_fusion(group, cfg), threads)
    logger.info(
        f"Fused {len(runs)} runs: {len(pooled)} detections -> {len(fused)} "
        f"(N={cfg.n_sources}, rescale={cfg.rescale_mode.value})"
    )
    return fused


def nms_runs(
    runs: Sequence[DetectionRun],
    iou_thresh: float = 0.5,
    threads: int = 1,
) -> List[Detection]:
    """Pool all runs and apply greedy NMS per image."""
    _check_runs(runs)
    pooled = [det for run in runs for det in _tagged(run)]
    kept = _per_image(pooled, lambda group: nms(group, iou_thresh), threads)
    logger.info(f"NMS over {len(runs)} runs: {len(pooled)} detections -> {len(kept)}")
    return kept


def fuse_two_stage(
    runs: Sequence[DetectionRun],
    epoch_cfg: FusionConfig,
    model_cfg: Optional[FusionConfig] = None,
    threads: int = 1,
) -> List[Detection]:
    """Fuse the epochs of each model first, then fuse the models together.

    Stage one groups runs by ``source_model`` and fuses each group with N equal to
    that model's epoch count; a model with a single run passes through unchanged.
    Stage two fuses the per-model results with N equal to the number of models.
    """
    _check_runs(runs)
    model_cfg = model_cfg or epoch_cfg

    by_model: Dict[str, List[DetectionRun]] = {}
    for run in runs:
        by_model.setdefault(run.source_model, []).append(run)

    stage_one: List[DetectionRun] = []
    for model in sorted(by_model):
        model_runs = by_model[model]
        if len(model_runs) == 1:
            dets = _tagged(model_runs[0])
        else:
            cfg = epoch_cfg.model_copy(
                update={
                    "n_sources": len(model_runs),
                    "fused_model_name": model,
                    "ensemble_models": (model,),
                }
            )
            dets = fuse_runs(model_runs, cfg, threads)
        logger.debug(f"Stage one {model}: {len(model_runs)} epochs -> {len(dets)} boxes")
        stage_one.append(DetectionRun(source_model=model, source_epoch=None, detections=dets))

    return fuse_runs(stage_one, model_cfg.model_copy(update={"n_sources": None}), threads)
