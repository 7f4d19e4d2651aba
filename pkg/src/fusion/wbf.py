"""Weighted boxes fusion for the detections of a single image.

The procedure is fully deterministic:

1. drop detections scoring below ``score_thresh``;
2. multiply each score by its model weight and divide by the mean weight of the
   ensemble (``FusionConfig.mean_weight``), giving the effective score;
3. order by effective score descending, ties by (model, epoch, x1, y1, x2, y2, label);
4. each detection joins the same-label cluster whose *current fused box* overlaps it
   most, if that IoU exceeds ``iou_thresh``; otherwise it opens a new cluster;
5. a cluster's fused box is the effective-score-weighted mean of member coordinates
   and its score is the mean member score;
6. fused scores are rescaled by the number n of distinct (model, epoch) sources in
   the cluster against N = ``n_sources``.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from loguru import logger

from boxcore.geometry import XYXY, iou_xyxy
from boxcore.models import Box, Detection
from core.errors import InputValidationError
from fusion.models import Cluster, ClusterMember, FusionConfig, RescaleMode

SortKey = Tuple[float, str, int, float, float, float, float, int]


def detection_sort_key(det: Detection, score: Optional[float] = None) -> SortKey:
    """Descending score, then (model, epoch, x1, y1, x2, y2, label) ascending."""
    s = det.score if score is None else score
    epoch = -1 if det.source_epoch is None else det.source_epoch
    b = det.box
    return (-s, det.source_model, epoch, b.x1, b.y1, b.x2, b.y2, det.label)


def single_image_id(dets: Sequence[Detection]) -> Optional[str]:
    """Return the shared image_id, or raise if detections span several images."""
    ids = {d.image_id for d in dets}
    if len(ids) > 1:
        shown = ", ".join(sorted(ids)[:5])
        raise InputValidationError(
            f"detections must belong to one image, got {len(ids)} image ids ({shown})"
        )
    return next(iter(ids), None)


@dataclass
class _ClusterState:
    """Running sums of a cluster under construction."""

    label: int
    members: List[Tuple[Detection, float]] = field(default_factory=list)
    weight_sum: float = 0.0
    weighted: List[float] = field(default_factory=lambda: [0.0, 0.0, 0.0, 0.0])
    plain: List[float] = field(default_factory=lambda: [0.0, 0.0, 0.0, 0.0])
    lo: List[float] = field(default_factory=lambda: [float("inf")] * 4)
    hi: List[float] = field(default_factory=lambda: [float("-inf")] * 4)
    score_sum: float = 0.0
    score_lo: float = float("inf")
    score_hi: float = float("-inf")
    box: XYXY = (0.0, 0.0, 0.0, 0.0)

    def add(self, det: Detection, score: float) -> None:
        self.members.append((det, score))
        coords = det.box.as_tuple()
        self.weight_sum += score
        for i, c in enumerate(coords):
            self.weighted[i] += score * c
            self.plain[i] += c
            self.lo[i] = min(self.lo[i], c)
            self.hi[i] = max(self.hi[i], c)
        self.score_sum += score
        self.score_lo = min(self.score_lo, score)
        self.score_hi = max(self.score_hi, score)
        self.box = self._fused_box()

    def _fused_box(self) -> XYXY:
        n = len(self.members)
        out = []
        for i in range(4):
            if self.weight_sum > 0.0:
                c = self.weighted[i] / self.weight_sum
            else:
                c = self.plain[i] / n
            # fused coordinates stay inside the member envelope
            out.append(min(max(c, self.lo[i]), self.hi[i]))
        x1, y1, x2, y2 = out
        return (x1, y1, max(x1, x2), max(y1, y2))

    @property
    def mean_score(self) -> float:
        mean = self.score_sum / len(self.members)
        return min(max(mean, self.score_lo), self.score_hi)

    @property
    def n_sources(self) -> int:
        return len({det.source for det, _ in self.members})


def _rescale(score: float, n: int, n_total: int, mode: RescaleMode) -> float:
    if mode is RescaleMode.MIN_CLAMP:
        score = score * min(n, n_total) / n_total
    elif mode is RescaleMode.PROPORTIONAL:
        score = score * n / n_total
    return min(max(score, 0.0), 1.0)


def effective_scores(dets: Sequence[Detection], cfg: FusionConfig) -> List[float]:
    """Scores multiplied by model weight and normalized by the ensemble's mean weight.

    The normalizer does not depend on which models fired on the image, so the
    same detection scores the same on every image.
    """
    mean_weight = cfg.mean_weight()
    return [d.score * cfg.weight_of(d.source_model) / mean_weight for d in dets]


def _build_clusters(
    dets: Sequence[Detection], cfg: FusionConfig
) -> Tuple[List[_ClusterState], int]:
    kept = [d for d in dets if d.score >= cfg.score_thresh]
    scores = effective_scores(kept, cfg)
    order = sorted(range(len(kept)), key=lambda i: detection_sort_key(kept[i], scores[i]))

    clusters: List[_ClusterState] = []
    for i in order:
        det, score = kept[i], scores[i]
        coords = det.box.as_tuple()
        best: Optional[_ClusterState] = None
        best_iou = 0.0
        for cluster in clusters:
            if cluster.label != det.label:
                continue
            overlap = iou_xyxy(cluster.box, coords)
            if overlap > best_iou:
                best, best_iou = cluster, overlap
        if best is None or best_iou <= cfg.iou_thresh:
            best = _ClusterState(label=det.label)
            clusters.append(best)
        best.add(det, score)

    n_total = cfg.n_sources or len({d.source for d in kept}) or 1
    return clusters, n_total


def _fused_detection(
    state: _ClusterState, image_id: str, n_total: int, cfg: FusionConfig
) -> Detection:
    score = _rescale(state.mean_score, state.n_sources, n_total, cfg.rescale_mode)
    return Detection(
        image_id=image_id,
        box=Box.from_xyxy(state.box),
        score=score,
        label=state.label,
        source_model=cfg.fused_model_name,
        source_epoch=None,
    )


def _output_key(det: Detection) -> Tuple[float, float, float, float, float, int]:
    b = det.box
    return (-det.score, b.x1, b.y1, b.x2, b.y2, det.label)


def fuse_clusters(dets: Sequence[Detection], cfg: FusionConfig) -> List[Cluster]:
    """Run fusion and return every cluster with its members and fused detection."""
    image_id = single_image_id(dets)
    if image_id is None:
        return []
    states, n_total = _build_clusters(dets, cfg)
    clusters = [
        Cluster(
            members=[
                ClusterMember(detection=d, effective_score=s) for d, s in state.members
            ],
            fused=_fused_detection(state, image_id, n_total, cfg),
        )
        for state in states
    ]
    clusters.sort(key=lambda c: _output_key(c.fused))
    return clusters


def weighted_boxes_fusion(dets: Sequence[Detection], cfg: FusionConfig) -> List[Detection]:
    """Fuse the detections of ONE image.

    Args:
        dets: Detections sharing a single image_id. Empty input gives empty output.
        cfg: Fusion parameters.

    Returns:
        Fused detections sorted by final score descending.

    Raises:
        InputValidationError: if the detections span more than one image.
    """
    image_id = single_image_id(dets)
    if image_id is None:
        return []
    states, n_total = _build_clusters(dets, cfg)
    fused = [_fused_detection(state, image_id, n_total, cfg) for state in states]
    fused.sort(key=_output_key)
    logger.debug(f"WBF {image_id}: {len(dets)} boxes -> {len(fused)} clusters (N={n_total})")
    return fused


def group_by_image(dets: Iterable[Detection]) -> Dict[str, List[Detection]]:
    """Group detections by image_id, preserving input order inside each group."""
    groups: Dict[str, List[Detection]] = {}
    for det in dets:
        groups.setdefault(det.image_id, []).append(det)
    return groups
