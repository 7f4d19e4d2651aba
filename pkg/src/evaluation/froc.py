"""Free-response ROC: sensitivity against false positives per image."""

from typing import List, Sequence, Tuple

import numpy as np

from core.errors import EvaluationError, InputValidationError
from evaluation.models import DEFAULT_FP_TARGETS, FrocCurve, MatchResult
from fusion.wbf import detection_sort_key


def _sorted_outcomes(matched: MatchResult) -> Tuple[np.ndarray, np.ndarray]:
    """Scores and TP flags of counted detections in descending score order."""
    scored = sorted(matched.scored(), key=lambda m: detection_sort_key(m.detection))
    scores = np.fromiter((m.detection.score for m in scored), dtype=np.float64, count=len(scored))
    hits = np.fromiter((m.is_tp for m in scored), dtype=bool, count=len(scored))
    return scores, hits


def froc_curve(matched: MatchResult, n_images: int) -> FrocCurve:
    """Sweep the score threshold over every distinct detection score.

    Raises:
        EvaluationError: if there are no annotations (sensitivity is undefined).
        InputValidationError: if n_images is smaller than the images observed.
    """
    if matched.n_annotations == 0:
        raise EvaluationError("sensitivity is undefined without annotations")
    if n_images < 1 or n_images < len(matched.image_ids):
        raise InputValidationError(
            f"n_images={n_images} but {len(matched.image_ids)} images were observed"
        )

    scores, hits = _sorted_outcomes(matched)
    if scores.size == 0:
        return FrocCurve(n_images=n_images, n_annotations=matched.n_annotations)

    cum_tp = np.cumsum(hits)
    cum_fp = np.cumsum(~hits)
    # one operating point per distinct score: the last detection of each run of ties
    last = np.flatnonzero(np.append(scores[1:] != scores[:-1], True))

    return FrocCurve(
        thresholds=scores[last].tolist(),
        fp_per_image=(cum_fp[last] / n_images).tolist(),
        sensitivity=(cum_tp[last] / matched.n_annotations).tolist(),
        tp=cum_tp[last].tolist(),
        fp=cum_fp[last].tolist(),
        n_images=n_images,
        n_annotations=matched.n_annotations,
    )


def sensitivities_at(curve: FrocCurve, fp_targets: Sequence[float]) -> List[float]:
    """Best sensitivity among operating points with fp_per_image <= target (0 if none)."""
    fp = np.asarray(curve.fp_per_image, dtype=np.float64)
    sens = np.asarray(curve.sensitivity, dtype=np.float64)
    out = []
    for target in fp_targets:
        ok = fp <= target
        out.append(float(sens[ok].max()) if ok.any() else 0.0)
    return out


def precisions_at(curve: FrocCurve, fp_targets: Sequence[float]) -> List[float]:
    """Precision at the operating point that realizes each S@target (0 if none)."""
    fp = np.asarray(curve.fp_per_image, dtype=np.float64)
    tp = np.asarray(curve.tp, dtype=np.float64)
    fp_count = np.asarray(curve.fp, dtype=np.float64)
    out = []
    for target in fp_targets:
        ok = np.flatnonzero(fp <= target)
        if ok.size == 0:
            out.append(0.0)
            continue
        # sensitivity is non-decreasing along the sweep, so the last point is best
        i = ok[-1]
        total = tp[i] + fp_count[i]
        out.append(float(tp[i] / total) if total else 0.0)
    return out


def fp_at_sensitivity(curve: FrocCurve, level: float) -> float:
    """Fewest false positives per image needed to reach a sensitivity (inf if never)."""
    sens = np.asarray(curve.sensitivity, dtype=np.float64)
    fp = np.asarray(curve.fp_per_image, dtype=np.float64)
    reached = sens >= level
    if level <= 0.0:
        return 0.0
    return float(fp[reached].min()) if reached.any() else float("inf")


def froc(
    matched: MatchResult,
    n_images: int,
    fp_targets: Sequence[float] = DEFAULT_FP_TARGETS,
) -> Tuple[FrocCurve, List[float]]:
    """FROC curve plus sensitivity at each FP/image target."""
    curve = froc_curve(matched, n_images)
    return curve, sensitivities_at(curve, fp_targets)
