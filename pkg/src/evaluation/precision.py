"""Average precision with all-point interpolation of the precision envelope."""

from typing import Dict

import numpy as np

from core.errors import EvaluationError
from evaluation.models import MatchResult, PrecisionSummary
from fusion.wbf import detection_sort_key


def _all_point_ap(hits: np.ndarray, n_gt: int) -> float:
    if hits.size == 0:
        return 0.0
    cum_tp = np.cumsum(hits)
    recall = cum_tp / n_gt
    precision = cum_tp / np.arange(1, hits.size + 1)

    mrec = np.concatenate(([0.0], recall, [1.0]))
    mpre = np.concatenate(([0.0], precision, [0.0]))
    # precision envelope: best precision at any recall >= this one
    mpre = np.maximum.accumulate(mpre[::-1])[::-1]
    steps = np.flatnonzero(mrec[1:] != mrec[:-1])
    return float(np.sum((mrec[steps + 1] - mrec[steps]) * mpre[steps + 1]))


def average_precision(matched: MatchResult) -> PrecisionSummary:
    """AP per label at the matching IoU, and mAP as their mean.

    Labels are those carrying at least one counted annotation; a label without
    detections scores 0. With a single class mAP equals AP.

    Raises:
        EvaluationError: if there are no annotations.
    """
    if matched.n_annotations == 0:
        raise EvaluationError("average precision is undefined without annotations")

    scored = sorted(matched.scored(), key=lambda m: detection_sort_key(m.detection))
    per_label: Dict[int, float] = {}
    for label in sorted(matched.annotations_per_label):
        hits = np.fromiter(
            (m.is_tp for m in scored if m.detection.label == label), dtype=bool
        )
        per_label[label] = _all_point_ap(hits, matched.annotations_per_label[label])

    mean_ap = float(np.mean(list(per_label.values())))
    return PrecisionSummary(mean_ap=mean_ap, ap_per_label=per_label)
