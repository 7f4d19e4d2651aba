"""Pure geometric operations on boxes and RECIST measurements."""

import math
from typing import Tuple

from boxcore.models import (
    MEDIUM_UPPER_MM,
    SMALL_UPPER_MM,
    Box,
    RecistMeasurement,
    SizeBin,
)
from core.errors import InputValidationError

XYXY = Tuple[float, float, float, float]


def iou_xyxy(a: XYXY, b: XYXY) -> float:
    """IoU of two already-validated (x1, y1, x2, y2) tuples.

    Hot path for fusion and matching; callers guarantee x1 <= x2 and y1 <= y2.
    """
    iw = min(a[2], b[2]) - max(a[0], b[0])
    ih = min(a[3], b[3]) - max(a[1], b[1])
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    if union <= 0.0:
        return 0.0
    return min(inter / union, 1.0)


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two boxes.

    Area is (x2 - x1) * (y2 - y1). Returns 0.0 when the union has zero area.

    Raises:
        InputValidationError: if either argument is not a Box.
    """
    if not isinstance(a, Box) or not isinstance(b, Box):
        raise InputValidationError("iou expects two Box instances")
    return iou_xyxy(a.as_tuple(), b.as_tuple())


def recist_to_box(m: RecistMeasurement, pad_px: float = 5.0) -> Box:
    """Bounding box of the four RECIST endpoints grown by pad_px on every side."""
    if not math.isfinite(pad_px) or pad_px < 0:
        raise InputValidationError(f"pad_px must be a finite value >= 0, got {pad_px}")
    xs = [p[0] for p in m.endpoints()]
    ys = [p[1] for p in m.endpoints()]
    return Box(
        x1=min(xs) - pad_px,
        y1=min(ys) - pad_px,
        x2=max(xs) + pad_px,
        y2=max(ys) + pad_px,
    )


def short_axis_mm(m: RecistMeasurement, spacing_mm_per_px: float) -> float:
    """Length of the short axis in millimeters."""
    if not math.isfinite(spacing_mm_per_px) or spacing_mm_per_px <= 0:
        raise InputValidationError(
            f"pixel spacing must be positive, got {spacing_mm_per_px}"
        )
    (ax, ay), (bx, by) = m.short_axis
    return math.hypot(bx - ax, by - ay) * spacing_mm_per_px


def bin_of(sad_mm: float) -> SizeBin:
    """Size stratum of a lesion: [0,10) small, [10,30) medium, [30,inf) large."""
    if not math.isfinite(sad_mm) or sad_mm <= 0:
        raise InputValidationError(f"short-axis diameter must be positive, got {sad_mm}")
    if sad_mm < SMALL_UPPER_MM:
        return SizeBin.SMALL
    if sad_mm < MEDIUM_UPPER_MM:
        return SizeBin.MEDIUM
    return SizeBin.LARGE
