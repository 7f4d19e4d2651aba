"""Value types for boxes, detections and lesion annotations.

All models are frozen pydantic models; constructing one with invalid fields
raises ``pydantic.ValidationError``.
"""

from enum import Enum
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Point = Tuple[float, float]


class Box(BaseModel):
    """Axis-aligned rectangle in continuous pixel coordinates."""

    model_config = ConfigDict(frozen=True)

    x1: float = Field(allow_inf_nan=False, description="Left edge in pixels")
    y1: float = Field(allow_inf_nan=False, description="Top edge in pixels")
    x2: float = Field(allow_inf_nan=False, description="Right edge in pixels")
    y2: float = Field(allow_inf_nan=False, description="Bottom edge in pixels")

    @model_validator(mode="after")
    def _check_extent(self) -> "Box":
        if self.x2 < self.x1 or self.y2 < self.y1:
            raise ValueError(
                f"negative box extent: ({self.x1}, {self.y1}, {self.x2}, {self.y2})"
            )
        return self

    @classmethod
    def from_xyxy(cls, coords: Tuple[float, float, float, float]) -> "Box":
        x1, y1, x2, y2 = coords
        return cls(x1=x1, y1=y1, x2=x2, y2=y2)

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        """Continuous area, no +1 pixel convention."""
        return (self.x2 - self.x1) * (self.y2 - self.y1)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)


class Detection(BaseModel):
    """A scored box produced by one detector run on one image."""

    model_config = ConfigDict(frozen=True)

    image_id: str = Field(min_length=1, description="Opaque image identifier")
    box: Box = Field(description="Predicted box")
    score: float = Field(ge=0.0, le=1.0, description="Confidence in [0, 1]")
    label: int = Field(default=0, description="Category id; 0 is the single lesion class")
    source_model: str = Field(default="unknown", description="Detector that produced the box")
    source_epoch: Optional[int] = Field(default=None, description="Checkpoint epoch, if known")

    @property
    def source(self) -> Tuple[str, Optional[int]]:
        """The (model, epoch) tag identifying the run this detection came from."""
        return (self.source_model, self.source_epoch)


class RecistMeasurement(BaseModel):
    """Long- and short-axis diameters drawn by a radiologist, in pixel coordinates."""

    model_config = ConfigDict(frozen=True)

    long_axis: Tuple[Point, Point] = Field(description="Endpoints of the long axis")
    short_axis: Tuple[Point, Point] = Field(description="Endpoints of the short axis")

    @field_validator("long_axis", "short_axis")
    @classmethod
    def _distinct_endpoints(cls, axis: Tuple[Point, Point]) -> Tuple[Point, Point]:
        (ax, ay), (bx, by) = axis
        for value in (ax, ay, bx, by):
            if value != value or value in (float("inf"), float("-inf")):
                raise ValueError("RECIST endpoints must be finite")
        if (ax, ay) == (bx, by):
            raise ValueError(f"axis endpoints coincide at ({ax}, {ay})")
        return axis

    @classmethod
    def from_flat(cls, values: Tuple[float, ...]) -> "RecistMeasurement":
        """Build from 8 numbers: long x1 y1 x2 y2, then short x1 y1 x2 y2."""
        if len(values) != 8:
            raise ValueError(f"expected 8 RECIST coordinates, got {len(values)}")
        v = [float(x) for x in values]
        return cls(
            long_axis=((v[0], v[1]), (v[2], v[3])),
            short_axis=((v[4], v[5]), (v[6], v[7])),
        )

    def flat(self) -> Tuple[float, ...]:
        (a, b), (c, d) = self.long_axis
        (e, f), (g, h) = self.short_axis
        return (a, b, c, d, e, f, g, h)

    def endpoints(self) -> Tuple[Point, Point, Point, Point]:
        return (*self.long_axis, *self.short_axis)


class LesionAnnotation(BaseModel):
    """Ground-truth lesion: box, optional RECIST lines and short-axis diameter."""

    model_config = ConfigDict(frozen=True)

    image_id: str = Field(min_length=1, description="Image the lesion lies on")
    box: Box = Field(description="Ground-truth box")
    label: int = Field(default=0, description="Category id")
    recist: Optional[RecistMeasurement] = Field(default=None, description="RECIST lines")
    sad_mm: Optional[float] = Field(
        default=None,
        gt=0.0,
        allow_inf_nan=False,
        description="Short-axis diameter in millimeters",
    )
    lesion_id: Optional[str] = Field(default=None, description="Optional stable identifier")


class SizeBin(str, Enum):
    """Lesion size strata by short-axis diameter."""

    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"

    @property
    def row_label(self) -> str:
        """Label used in report rows."""
        return _BIN_LABELS[self]


_BIN_LABELS = {
    SizeBin.SMALL: "SAD<10mm",
    SizeBin.MEDIUM: "10mm–30mm",
    SizeBin.LARGE: "SAD≥30mm",
}

SMALL_UPPER_MM = 10.0
MEDIUM_UPPER_MM = 30.0
