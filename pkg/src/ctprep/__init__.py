"""CT slice preparation: windowing, 8-bit normalization, equalization, 3-slice stacks."""

from ctprep.models import PreparedImage, PrepProvenance, SliceVolume
from ctprep.raster_io import (
    decode_volume,
    encode_volume,
    load_volume,
    save_prepared,
    save_volume,
)
from ctprep.transforms import (
    hist_equalize,
    neighbor_indices,
    normalize_u8,
    prepare_slice,
    stack_3slice,
    window_clip,
)

__all__ = [
    # Models
    "SliceVolume",
    "PreparedImage",
    "PrepProvenance",
    # Transforms
    "window_clip",
    "normalize_u8",
    "hist_equalize",
    "prepare_slice",
    "neighbor_indices",
    "stack_3slice",
    # I/O
    "load_volume",
    "save_volume",
    "encode_volume",
    "decode_volume",
    "save_prepared",
]
