"""Greedy non-maximum suppression, the classical baseline for fusion."""

from typing import Dict, List, Sequence

from loguru import logger

from boxcore.geometry import iou_xyxy
from boxcore.models import Detection
from core.errors import InputValidationError
from fusion.wbf import detection_sort_key, single_image_id


def nms(dets: Sequence[Detection], iou_thresh: float = 0.5) -> List[Detection]:
    """Keep the best-scoring box and drop same-label boxes overlapping a kept one.

    Args:
        dets: Detections of ONE image.
        iou_thresh: A box is suppressed when its IoU with a kept box exceeds this.

    Returns:
        Surviving detections, unchanged, in descending score order.
    """
    if not 0.0 < iou_thresh <= 1.0:
        raise InputValidationError(f"iou_thresh must be in (0, 1], got {iou_thresh}")
    image_id = single_image_id(dets)
    if image_id is None:
        return []

    kept: List[Detection] = []
    kept_by_label: Dict[int, List[tuple]] = {}
    for det in sorted(dets, key=detection_sort_key):
        coords = det.box.as_tuple()
        others = kept_by_label.setdefault(det.label, [])
        if any(iou_xyxy(coords, other) > iou_thresh for other in others):
            continue
        others.append(coords)
        kept.append(det)

    logger.debug(f"NMS {image_id}: {len(dets)} boxes -> {len(kept)} kept")
    return kept
