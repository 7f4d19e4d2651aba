"""Windowing, 8-bit normalization, histogram equalization and 3-slice stacking.

Rounding is half away from zero throughout.
"""

from typing import Tuple

import numpy as np
from loguru import logger

from core.errors import InputValidationError
from ctprep.models import PreparedImage, PrepProvenance, SliceVolume, Window, check_window


def _round_half_away(values: np.ndarray) -> np.ndarray:
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def window_clip(raster: np.ndarray, window: Window) -> np.ndarray:
    """Clamp HU values into [lo, hi]."""
    lo, hi = check_window(window)
    return np.clip(np.asarray(raster, dtype=np.float64), lo, hi)


def normalize_u8(raster: np.ndarray, window: Window) -> np.ndarray:
    """Map [lo, hi] linearly onto [0, 255].

    Raises:
        InputValidationError: if any value lies outside the window (clip first).
    """
    lo, hi = check_window(window)
    values = np.asarray(raster, dtype=np.float64)
    if values.size and (values.min() < lo or values.max() > hi):
        raise InputValidationError(
            f"values span [{values.min()}, {values.max()}] outside window ({lo}, {hi})"
        )
    scaled = (values - lo) / (hi - lo) * 255.0
    return _round_half_away(scaled).astype(np.uint8)


def hist_equalize(img: np.ndarray) -> np.ndarray:
    """256-bin cumulative-histogram equalization.

    out(v) = round((cdf(v) - cdf_min) / (n - cdf_min) * 255), where cdf_min is
    the CDF at the lowest occupied bin. A raster holding one value is returned
    unchanged.
    """
    img = np.asarray(img)
    if img.size == 0:
        raise InputValidationError("cannot equalize an empty raster")
    if img.dtype != np.uint8:
        raise InputValidationError(f"expected uint8 raster, got {img.dtype}")

    hist = np.bincount(img.ravel(), minlength=256)
    if np.count_nonzero(hist) == 1:
        return img.copy()

    cdf = np.cumsum(hist)
    cdf_min = cdf[np.flatnonzero(hist)[0]]
    lut = (cdf - cdf_min) / float(img.size - cdf_min) * 255.0
    lut = np.clip(_round_half_away(lut), 0, 255).astype(np.uint8)
    return lut[img]


def prepare_slice(raster: np.ndarray, window: Window, equalize: bool = True) -> np.ndarray:
    """window_clip -> normalize_u8 -> (optionally) hist_equalize."""
    out = normalize_u8(window_clip(raster, window), window)
    return hist_equalize(out) if equalize else out


def neighbor_indices(n_slices: int, key: int) -> Tuple[int, int, int]:
    """(below, key, above), replicating the key slice past the volume ends."""
    if not 0 <= key < n_slices:
        raise InputValidationError(f"key slice {key} outside [0, {n_slices})")
    below = key - 1 if key > 0 else key
    above = key + 1 if key + 1 < n_slices else key
    return (below, key, above)


def stack_3slice(vol: SliceVolume, key: int, equalize: bool = True) -> PreparedImage:
    """Build the 3-channel image centred on the key slice.

    Each neighbour is prepared with its own window; equalization is per slice.
    """
    indices = neighbor_indices(vol.n_slices, key)
    channels = [prepare_slice(vol.slices[i], vol.windows[i], equalize) for i in indices]
    pixels = np.stack(channels, axis=-1)

    provenance = PrepProvenance(
        key_slice=key,
        source_slices=indices,
        windows=tuple(check_window(vol.windows[i]) for i in indices),
        equalized=equalize,
        pixel_spacing_mm=vol.pixel_spacing_mm,
        slice_spacing_mm=vol.slice_spacing_mm,
    )
    logger.debug(f"Prepared key slice {key} from slices {indices} (equalize={equalize})")
    return PreparedImage(pixels=pixels, key_slice=key, provenance=provenance)
