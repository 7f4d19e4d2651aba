"""Mapping-driven CSV adapter producing annotation records.

The adapter never assumes a dataset layout. Every target field is mapped to a
CSV column with ``field=column``; packed columns hold several numbers separated
by commas or whitespace (``box`` = x1 y1 x2 y2, ``recist`` = 8 endpoint
coordinates, ``spacing`` = first number of the cell).
"""

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import pandas as pd
from loguru import logger
from pydantic import ValidationError

from boxcore.geometry import recist_to_box
from boxcore.models import RecistMeasurement
from cli_tools.records import AnnotationRecord
from core.errors import InputValidationError, RecordParseError
from core.registry import format_validation_error

BOX_FIELDS = ("x1", "y1", "x2", "y2")
RECIST_FIELDS = (
    "long_x1", "long_y1", "long_x2", "long_y2",
    "short_x1", "short_y1", "short_x2", "short_y2",
)
SCALAR_FIELDS = ("image_id", "label", "sad_mm", "spacing", "lesion_id")
PACKED_FIELDS = ("box", "recist")
KNOWN_FIELDS = frozenset(BOX_FIELDS + RECIST_FIELDS + SCALAR_FIELDS + PACKED_FIELDS)

_SPLIT = re.compile(r"[,\s]+")


@dataclass
class IngestResult:
    """Records that validated, and (csv line, reason) for rows that did not."""

    records: List[AnnotationRecord] = field(default_factory=list)
    rejected: List[Tuple[int, str]] = field(default_factory=list)


def parse_mapping(items: Iterable[str]) -> Dict[str, str]:
    """Parse ``field=column`` items into a mapping."""
    mapping: Dict[str, str] = {}
    for item in items:
        name, sep, column = item.partition("=")
        name, column = name.strip(), column.strip()
        if not sep or not name or not column:
            raise InputValidationError(f"mapping must look like field=column, got {item!r}")
        if name not in KNOWN_FIELDS:
            raise InputValidationError(
                f"unknown mapping field {name!r}; known: {', '.join(sorted(KNOWN_FIELDS))}"
            )
        mapping[name] = column
    return mapping


def _check_mapping(mapping: Dict[str, str]) -> None:
    if "image_id" not in mapping:
        raise InputValidationError("mapping must name the image_id column")
    has_box_columns = [f for f in BOX_FIELDS if f in mapping]
    endpoint_columns = [f for f in RECIST_FIELDS if f in mapping]
    has_recist = "recist" in mapping or bool(endpoint_columns)
    if has_box_columns and len(has_box_columns) != len(BOX_FIELDS):
        raise InputValidationError("box mapping must name all of x1, y1, x2, y2")
    if "box" not in mapping and not has_box_columns and not has_recist:
        raise InputValidationError(
            "mapping must name a box (packed or x1, y1, x2, y2) or RECIST endpoints to derive it from"
        )
    if endpoint_columns and len(endpoint_columns) != len(RECIST_FIELDS):
        missing = [f for f in RECIST_FIELDS if f not in mapping]
        raise InputValidationError(f"incomplete RECIST endpoint mapping, missing {missing}")


def _numbers(text: str, expected: Optional[int] = None) -> List[float]:
    parts = [p for p in _SPLIT.split(text.strip().strip("[]()")) if p]
    values = [float(p) for p in parts]
    if expected is not None and len(values) != expected:
        raise ValueError(f"expected {expected} numbers, got {len(values)} in {text!r}")
    return values


def _row_values(
    row: Dict[str, str], mapping: Dict[str, str], pad_px: float
) -> Dict[str, object]:
    def cell(name: str) -> Optional[str]:
        column = mapping.get(name)
        if column is None:
            return None
        value = row[column].strip()
        return value or None

    values: Dict[str, object] = {"image_id": cell("image_id")}
    packed_box = cell("box")
    if packed_box is not None:
        values.update(zip(BOX_FIELDS, _numbers(packed_box, 4)))
    else:
        for name in BOX_FIELDS:
            values[name] = cell(name)

    recist: Optional[List[float]] = None
    packed_recist = cell("recist")
    if packed_recist is not None:
        recist = _numbers(packed_recist, 8)
    else:
        endpoints = [cell(name) for name in RECIST_FIELDS]
        if all(v is not None for v in endpoints):
            recist = [float(v) for v in endpoints if v is not None]
    if recist is not None:
        values["recist"] = recist
        if all(values.get(name) is None for name in BOX_FIELDS):
            box = recist_to_box(RecistMeasurement.from_flat(tuple(recist)), pad_px)
            values.update(x1=box.x1, y1=box.y1, x2=box.x2, y2=box.y2)

    spacing = cell("spacing")
    if spacing is not None:
        values["spacing_mm_px"] = _numbers(spacing)[0]
    for name in ("label", "sad_mm", "lesion_id"):
        value = cell(name)
        if value is not None:
            values[name] = value
    return values


def ingest_generic_csv(
    path: Union[str, Path],
    mapping: Dict[str, str],
    strict: bool = False,
    default_spacing: Optional[float] = None,
    recist_pad_px: float = 5.0,
) -> IngestResult:
    """Map CSV rows to annotation records.

    SAD is derived from RECIST and spacing when the row has no sad_mm. Rows
    without box columns get the RECIST endpoint box grown by ``recist_pad_px``.

    Raises:
        InputValidationError: if the mapping is incomplete or names a missing column.
        RecordParseError: for the first invalid row when ``strict`` is set.
    """
    path = Path(path)
    _check_mapping(mapping)
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    absent = sorted({c for c in mapping.values() if c not in frame.columns})
    if absent:
        raise InputValidationError(f"{path}: mapped columns not found: {', '.join(absent)}")

    result = IngestResult()
    for index, row in enumerate(frame.to_dict(orient="records")):
        lineno = index + 2  # header is line 1
        try:
            record = AnnotationRecord.model_validate(_row_values(row, mapping, recist_pad_px))
            annotation = record.to_annotation(default_spacing)
        except (ValidationError, ValueError) as e:
            reason = format_validation_error(e) if isinstance(e, ValidationError) else str(e)
            if strict:
                raise RecordParseError(reason, path=path, line=lineno) from e
            logger.warning(f"{path}:{lineno}: skipped row: {reason}")
            result.rejected.append((lineno, reason))
            continue
        result.records.append(AnnotationRecord.from_annotation(annotation, record.spacing_mm_px))

    logger.info(f"Ingested {len(result.records)} rows from {path} ({len(result.rejected)} rejected)")
    return result
