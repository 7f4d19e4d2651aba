"""Metric reports, overall and stratified by lesion short-axis diameter."""

from typing import Iterable, List, Mapping, Optional, Sequence, Union

from loguru import logger

from boxcore.geometry import bin_of, short_axis_mm
from boxcore.models import Detection, LesionAnnotation, SizeBin
from core.errors import InputValidationError
from evaluation.froc import froc_curve, precisions_at, sensitivities_at
from evaluation.matching import match
from evaluation.models import BinReport, EvalReport, EvaluationConfig, MatchResult
from evaluation.precision import average_precision

SpacingInfo = Union[float, Mapping[str, float], None]


def count_images(
    dets: Sequence[Detection],
    gts: Sequence[LesionAnnotation],
    image_ids: Optional[Iterable[str]] = None,
) -> int:
    """Evaluated images: the manifest plus every image seen in either input."""
    ids = set(image_ids or ())
    ids.update(d.image_id for d in dets)
    ids.update(g.image_id for g in gts)
    return len(ids)


def _report(
    method: str,
    matched: MatchResult,
    n_images: int,
    n_detections: int,
    cfg: EvaluationConfig,
) -> EvalReport:
    curve = froc_curve(matched, n_images)
    summary = average_precision(matched)
    return EvalReport(
        method=method,
        n_images=n_images,
        n_annotations=matched.n_annotations,
        n_detections=n_detections,
        n_ignored=matched.n_ignored,
        tp=matched.tp,
        fp=matched.fp,
        fn=matched.fn,
        mean_ap=summary.mean_ap,
        ap_per_label=summary.ap_per_label,
        fp_targets=list(cfg.fp_targets),
        sensitivities=sensitivities_at(curve, cfg.fp_targets),
        precisions=precisions_at(curve, cfg.fp_targets),
        curve=curve,
    )


def evaluate(
    dets: Sequence[Detection],
    gts: Sequence[LesionAnnotation],
    cfg: Optional[EvaluationConfig] = None,
    image_ids: Optional[Iterable[str]] = None,
) -> EvalReport:
    """Unstratified report: mAP and S@t for every FP target.

    Raises:
        EvaluationError: if there are no annotations.
    """
    cfg = cfg or EvaluationConfig()
    n_images = count_images(dets, gts, image_ids)
    matched = match(dets, gts, cfg.match_iou)
    return _report(cfg.method_name, matched, n_images, len(dets), cfg)


def resolve_sad(gts: Sequence[LesionAnnotation], spacing: SpacingInfo = None) -> List[float]:
    """Short-axis diameter of each annotation, derived from RECIST when absent.

    Args:
        gts: Annotations.
        spacing: Pixel spacing in mm/px, either one value for all images or a
            mapping keyed by image_id.

    Raises:
        InputValidationError: listing every annotation whose SAD cannot be derived.
    """
    out: List[float] = []
    missing: List[str] = []
    for idx, gt in enumerate(gts):
        if gt.sad_mm is not None:
            out.append(gt.sad_mm)
            continue
        px = spacing.get(gt.image_id) if isinstance(spacing, Mapping) else spacing
        if gt.recist is None or px is None:
            missing.append(gt.lesion_id or f"{gt.image_id}#{idx}")
            out.append(float("nan"))
            continue
        out.append(short_axis_mm(gt.recist, px))
    if missing:
        shown = ", ".join(missing[:20]) + (" ..." if len(missing) > 20 else "")
        raise InputValidationError(
            f"{len(missing)} annotations have no sad_mm and no RECIST+spacing: {shown}"
        )
    return out


def stratified_report(
    dets: Sequence[Detection],
    gts: Sequence[LesionAnnotation],
    spacing: SpacingInfo = None,
    cfg: Optional[EvaluationConfig] = None,
    image_ids: Optional[Iterable[str]] = None,
) -> EvalReport:
    """Overall report plus one sub-report per size bin.

    Within a bin, annotations of other bins are ignore regions: a detection whose
    best match is one of them counts as neither TP nor FP. FP/image always uses
    every evaluated image. An empty bin yields a BinReport without a report.
    """
    cfg = cfg or EvaluationConfig()
    sads = resolve_sad(gts, spacing)
    bins = [bin_of(s) for s in sads]
    n_images = count_images(dets, gts, image_ids)

    overall = _report(cfg.method_name, match(dets, gts, cfg.match_iou), n_images, len(dets), cfg)

    for size_bin in SizeBin:
        ignored = [b is not size_bin for b in bins]
        n_in_bin = ignored.count(False)
        if n_in_bin == 0:
            overall.bins.append(BinReport(size_bin=size_bin, n_annotations=0))
            logger.debug(f"Bin {size_bin.value}: no annotations")
            continue
        matched = match(dets, gts, cfg.match_iou, ignored=ignored)
        sub = _report(
            f"{cfg.method_name} ({size_bin.row_label})", matched, n_images, len(dets), cfg
        )
        overall.bins.append(BinReport(size_bin=size_bin, n_annotations=n_in_bin, report=sub))
        logger.debug(
            f"Bin {size_bin.value}: {n_in_bin} lesions, mAP={sub.mean_ap:.4f}, "
            f"ignored={sub.n_ignored}"
        )
    return overall
