"""Reading slice volumes and writing prepared images.

Binary container (all fields little-endian):

    magic      4 bytes  b"LFSV"
    version    uint16   1
    reserved   uint16   0
    width      uint32
    height     uint32
    n_slices   uint32
    pixel_mm   float64  in-plane spacing, mm/px
    slice_mm   float64  slice spacing, mm
    windows    n_slices x (lo float64, hi float64)
    body       n_slices * height * width int16, row-major

The textual form is a JSON object with the same fields (see VolumeDocument).
"""

from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
from loguru import logger
from PIL import Image
from pydantic import BaseModel, Field, ValidationError

from core.errors import InputValidationError, RecordParseError
from ctprep.models import PreparedImage, SliceVolume

MAGIC = b"LFSV"
CONTAINER_VERSION = 1

HEADER_DTYPE = np.dtype(
    [
        ("magic", "S4"),
        ("version", "<u2"),
        ("reserved", "<u2"),
        ("width", "<u4"),
        ("height", "<u4"),
        ("n_slices", "<u4"),
        ("pixel_spacing_mm", "<f8"),
        ("slice_spacing_mm", "<f8"),
    ]
)
WINDOW_DTYPE = np.dtype([("lo", "<f8"), ("hi", "<f8")])
BODY_DTYPE = np.dtype("<i2")


class VolumeDocument(BaseModel):
    """Textual volume form for small fixtures."""

    width: int = Field(gt=0)
    height: int = Field(gt=0)
    pixel_spacing_mm: float = Field(default=1.0, gt=0)
    slice_spacing_mm: float = Field(default=1.0, gt=0)
    windows: List[Tuple[float, float]]
    slices: List[List[List[int]]]


def encode_volume(vol: SliceVolume) -> bytes:
    header = np.array(
        [
            (
                MAGIC,
                CONTAINER_VERSION,
                0,
                vol.width,
                vol.height,
                vol.n_slices,
                vol.pixel_spacing_mm,
                vol.slice_spacing_mm,
            )
        ],
        dtype=HEADER_DTYPE,
    )
    windows = np.array([tuple(w) for w in vol.windows], dtype=WINDOW_DTYPE)
    body = np.ascontiguousarray(vol.slices, dtype=BODY_DTYPE)
    return header.tobytes() + windows.tobytes() + body.tobytes()


def decode_volume(buf: bytes, source: str = "<bytes>") -> SliceVolume:
    if len(buf) < HEADER_DTYPE.itemsize:
        raise RecordParseError("file too short for a volume header", path=source)
    header = np.frombuffer(buf, dtype=HEADER_DTYPE, count=1)[0]
    if bytes(header["magic"]) != MAGIC:
        raise RecordParseError(
            f"bad header magic {bytes(header['magic'])!r}, expected {MAGIC!r}", path=source
        )
    if int(header["version"]) != CONTAINER_VERSION:
        raise RecordParseError(f"unsupported container version {int(header['version'])}", path=source)

    width, height, n = int(header["width"]), int(header["height"]), int(header["n_slices"])
    offset = HEADER_DTYPE.itemsize
    expected = offset + n * WINDOW_DTYPE.itemsize + n * height * width * BODY_DTYPE.itemsize
    if len(buf) != expected:
        raise RecordParseError(
            f"expected {expected} bytes for {n}x{height}x{width}, found {len(buf)}", path=source
        )

    windows = np.frombuffer(buf, dtype=WINDOW_DTYPE, count=n, offset=offset)
    offset += n * WINDOW_DTYPE.itemsize
    body = np.frombuffer(buf, dtype=BODY_DTYPE, count=n * height * width, offset=offset)
    return SliceVolume(
        slices=body.reshape(n, height, width).astype(np.int16),
        windows=[(float(w["lo"]), float(w["hi"])) for w in windows],
        pixel_spacing_mm=float(header["pixel_spacing_mm"]),
        slice_spacing_mm=float(header["slice_spacing_mm"]),
    )


def volume_from_document(doc: VolumeDocument) -> SliceVolume:
    slices = np.asarray(doc.slices, dtype=np.int64)
    if slices.ndim != 3 or slices.shape[1:] != (doc.height, doc.width):
        raise InputValidationError(
            f"slices have shape {slices.shape}, expected (n, {doc.height}, {doc.width})"
        )
    if slices.min() < np.iinfo(np.int16).min or slices.max() > np.iinfo(np.int16).max:
        raise InputValidationError("HU values must fit in signed 16 bits")
    return SliceVolume(
        slices=slices.astype(np.int16),
        windows=[tuple(w) for w in doc.windows],
        pixel_spacing_mm=doc.pixel_spacing_mm,
        slice_spacing_mm=doc.slice_spacing_mm,
    )


def document_from_volume(vol: SliceVolume) -> VolumeDocument:
    return VolumeDocument(
        width=vol.width,
        height=vol.height,
        pixel_spacing_mm=vol.pixel_spacing_mm,
        slice_spacing_mm=vol.slice_spacing_mm,
        windows=[tuple(w) for w in vol.windows],
        slices=vol.slices.tolist(),
    )


def load_volume(path: Union[str, Path]) -> SliceVolume:
    """Load a volume; ``.json`` files use the textual form, anything else the binary one."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        try:
            doc = VolumeDocument.model_validate_json(path.read_text(encoding="utf-8"))
        except ValidationError as e:
            raise RecordParseError(f"invalid volume document: {e}", path=path) from e
        vol = volume_from_document(doc)
    else:
        vol = decode_volume(path.read_bytes(), source=str(path))
    logger.debug(f"Loaded volume {path}: {vol.n_slices}x{vol.height}x{vol.width}")
    return vol


def save_volume(vol: SliceVolume, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix.lower() == ".json":
        path.write_text(document_from_volume(vol).model_dump_json(), encoding="utf-8")
    else:
        path.write_bytes(encode_volume(vol))
    return path


def sidecar_path(image_path: Union[str, Path]) -> Path:
    image_path = Path(image_path)
    return image_path.with_name(image_path.name + ".json")


def save_prepared(image: PreparedImage, path: Union[str, Path]) -> Tuple[Path, Path]:
    """Write the RGB raster (format from the extension: .png, .ppm, ...) and its sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.ascontiguousarray(image.pixels)).save(path)
    sidecar = sidecar_path(path)
    sidecar.write_text(image.provenance.model_dump_json(indent=2), encoding="utf-8")
    logger.info(f"Wrote prepared image {path} (+ {sidecar.name})")
    return path, sidecar


def load_prepared_pixels(path: Union[str, Path]) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"))
