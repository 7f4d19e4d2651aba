"""Greedy IoU matching of detections to annotations."""

from collections import Counter
from typing import Dict, List, Optional, Sequence

from loguru import logger

from boxcore.geometry import iou_xyxy
from boxcore.models import Detection, LesionAnnotation
from core.errors import InputValidationError
from evaluation.models import MatchedDetection, MatchResult
from fusion.wbf import detection_sort_key, group_by_image


def _match_image(
    dets: List[Detection],
    gts: List[LesionAnnotation],
    gt_indices: List[int],
    ignored: Sequence[bool],
    iou_thresh: float,
) -> List[MatchedDetection]:
    taken = [False] * len(gts)
    boxes = [g.box.as_tuple() for g in gts]
    out: List[MatchedDetection] = []

    for det in sorted(dets, key=detection_sort_key):
        coords = det.box.as_tuple()
        best: Optional[int] = None
        best_iou = -1.0
        for j, gt in enumerate(gts):
            if gt.label != det.label:
                continue
            is_ignored = ignored[gt_indices[j]]
            # matched annotations are no longer candidates; ignored ones always are
            if taken[j] and not is_ignored:
                continue
            overlap = iou_xyxy(coords, boxes[j])
            if overlap > best_iou:
                best, best_iou = j, overlap

        if best is None or best_iou < iou_thresh:
            out.append(MatchedDetection(detection=det))
        elif ignored[gt_indices[best]]:
            out.append(
                MatchedDetection(
                    detection=det,
                    annotation=gts[best],
                    annotation_index=gt_indices[best],
                    ignored=True,
                )
            )
        else:
            taken[best] = True
            out.append(
                MatchedDetection(
                    detection=det,
                    annotation=gts[best],
                    annotation_index=gt_indices[best],
                    is_tp=True,
                )
            )
    return out


def match(
    dets: Sequence[Detection],
    gts: Sequence[LesionAnnotation],
    iou_thresh: float = 0.5,
    ignored: Optional[Sequence[bool]] = None,
) -> MatchResult:
    """Match detections to annotations image by image.

    Detections are processed by descending score. Each takes the unmatched,
    same-label annotation with the highest IoU if that IoU >= iou_thresh;
    otherwise it is a false positive. A second hit on a matched annotation is
    therefore a false positive.

    Args:
        dets: Detections over any number of images.
        gts: Annotations over any number of images.
        iou_thresh: Minimum IoU for a hit.
        ignored: Optional flags aligned with ``gts``. Ignored annotations never
            count as hits or misses, and a detection whose best candidate is an
            ignored annotation is left out of both TP and FP counts.

    Returns:
        MatchResult with per-image outcomes and tp/fp/fn totals.
    """
    if not 0.0 < iou_thresh <= 1.0:
        raise InputValidationError(f"iou_thresh must be in (0, 1], got {iou_thresh}")
    flags: Sequence[bool] = ignored if ignored is not None else [False] * len(gts)
    if len(flags) != len(gts):
        raise InputValidationError(
            f"ignored flags ({len(flags)}) must align with annotations ({len(gts)})"
        )

    det_groups = group_by_image(dets)
    gt_groups: Dict[str, List[int]] = {}
    for idx, gt in enumerate(gts):
        gt_groups.setdefault(gt.image_id, []).append(idx)

    image_ids = sorted(set(det_groups) | set(gt_groups))
    per_image: Dict[str, List[MatchedDetection]] = {}
    tp = fp = n_ignored = 0
    for image_id in image_ids:
        indices = gt_groups.get(image_id, [])
        matched = _match_image(
            det_groups.get(image_id, []),
            [gts[i] for i in indices],
            indices,
            flags,
            iou_thresh,
        )
        per_image[image_id] = matched
        for m in matched:
            if m.ignored:
                n_ignored += 1
            elif m.is_tp:
                tp += 1
            else:
                fp += 1

    counted = Counter(gt.label for gt, skip in zip(gts, flags) if not skip)
    n_annotations = sum(counted.values())
    result = MatchResult(
        per_image=per_image,
        image_ids=image_ids,
        tp=tp,
        fp=fp,
        fn=n_annotations - tp,
        n_ignored=n_ignored,
        n_annotations=n_annotations,
        annotations_per_label=dict(counted),
        iou_thresh=iou_thresh,
    )
    logger.debug(
        f"Matched {len(dets)} detections to {n_annotations} annotations over "
        f"{len(image_ids)} images: tp={tp} fp={fp} fn={result.fn} ignored={n_ignored}"
    )
    return result
