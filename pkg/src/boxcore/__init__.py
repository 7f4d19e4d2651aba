"""Geometric primitives, annotations and detection records."""

from boxcore.geometry import bin_of, iou, iou_xyxy, recist_to_box, short_axis_mm
from boxcore.models import (
    Box,
    Detection,
    LesionAnnotation,
    RecistMeasurement,
    SizeBin,
)

__all__ = [
    # Models
    "Box",
    "Detection",
    "LesionAnnotation",
    "RecistMeasurement",
    "SizeBin",
    # Operations
    "iou",
    "iou_xyxy",
    "recist_to_box",
    "short_axis_mm",
    "bin_of",
]
