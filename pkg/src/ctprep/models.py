"""Slice volumes and prepared 3-channel images."""

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.errors import InputValidationError

Window = Tuple[float, float]


def check_window(window: Window) -> Window:
    lo, hi = float(window[0]), float(window[1])
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
        raise InputValidationError(f"window must satisfy lo < hi, got ({lo}, {hi})")
    return lo, hi


@dataclass(frozen=True)
class SliceVolume:
    """Stack of HU slices with a display window per slice.

    ``slices`` has shape (n_slices, height, width) and a signed integer dtype.
    """

    slices: np.ndarray
    windows: List[Window]
    pixel_spacing_mm: float = 1.0
    slice_spacing_mm: float = 1.0

    def __post_init__(self) -> None:
        if self.slices.ndim != 3 or self.slices.shape[0] == 0:
            raise InputValidationError(
                f"slices must be a non-empty (n, height, width) array, got shape {self.slices.shape}"
            )
        if not np.issubdtype(self.slices.dtype, np.signedinteger):
            raise InputValidationError(f"HU slices must be signed integers, got {self.slices.dtype}")
        if len(self.windows) != self.slices.shape[0]:
            raise InputValidationError(
                f"{len(self.windows)} windows for {self.slices.shape[0]} slices"
            )
        for window in self.windows:
            check_window(window)
        if self.pixel_spacing_mm <= 0 or self.slice_spacing_mm <= 0:
            raise InputValidationError("spacings must be positive")

    @property
    def n_slices(self) -> int:
        return int(self.slices.shape[0])

    @property
    def height(self) -> int:
        return int(self.slices.shape[1])

    @property
    def width(self) -> int:
        return int(self.slices.shape[2])


class PrepProvenance(BaseModel):
    """How a prepared image was produced; written as a sidecar JSON."""

    model_config = ConfigDict(frozen=True)

    key_slice: int
    source_slices: Tuple[int, int, int] = Field(description="Slice index per channel (below, key, above)")
    windows: Tuple[Window, Window, Window] = Field(description="HU window applied per channel")
    equalized: bool
    channel_order: str = "below,key,above"
    pixel_spacing_mm: float
    slice_spacing_mm: float


@dataclass(frozen=True)
class PreparedImage:
    """Height x width x 3 uint8 raster; channels are (below, key, above)."""

    pixels: np.ndarray
    key_slice: int
    provenance: PrepProvenance = field(repr=False)

    def __post_init__(self) -> None:
        if self.pixels.dtype != np.uint8 or self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise InputValidationError("prepared image must be an (h, w, 3) uint8 array")
