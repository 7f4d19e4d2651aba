"""Wire forms of detections and annotations, and their JSONL files.

One JSON object per line. Unknown fields are ignored; a line that does not
parse or does not validate raises ``RecordParseError`` naming ``file:line``.
"""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Tuple, Type, TypeVar, Union

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from boxcore.geometry import short_axis_mm
from boxcore.models import Box, Detection, LesionAnnotation, RecistMeasurement
from core.errors import RecordParseError
from core.registry import format_validation_error
from simlab.models import SceneManifest

PathLike = Union[str, Path]
R = TypeVar("R", bound=BaseModel)
T = TypeVar("T")


class DetectionRecord(BaseModel):
    """One detection line."""

    model_config = ConfigDict(extra="ignore")

    image_id: str = Field(min_length=1)
    x1: float
    y1: float
    x2: float
    y2: float
    score: float
    label: int = 0
    model: Optional[str] = Field(default=None, description="Defaults to the file stem")
    epoch: Optional[int] = None

    def to_detection(self, default_model: str = "unknown") -> Detection:
        return Detection(
            image_id=self.image_id,
            box=Box(x1=self.x1, y1=self.y1, x2=self.x2, y2=self.y2),
            score=self.score,
            label=self.label,
            source_model=self.model or default_model,
            source_epoch=self.epoch,
        )

    @classmethod
    def from_detection(cls, det: Detection) -> "DetectionRecord":
        return cls(
            image_id=det.image_id,
            x1=det.box.x1,
            y1=det.box.y1,
            x2=det.box.x2,
            y2=det.box.y2,
            score=det.score,
            label=det.label,
            model=det.source_model,
            epoch=det.source_epoch,
        )


class AnnotationRecord(BaseModel):
    """One ground-truth lesion line."""

    model_config = ConfigDict(extra="ignore")

    image_id: str = Field(min_length=1)
    x1: float
    y1: float
    x2: float
    y2: float
    label: int = 0
    recist: Optional[List[float]] = Field(
        default=None, description="Long axis x1 y1 x2 y2, then short axis x1 y1 x2 y2"
    )
    sad_mm: Optional[float] = None
    spacing_mm_px: Optional[float] = None
    lesion_id: Optional[str] = None

    @field_validator("recist")
    @classmethod
    def _eight_numbers(cls, values: Optional[List[float]]) -> Optional[List[float]]:
        if values is not None and len(values) != 8:
            raise ValueError(f"recist needs 8 numbers, got {len(values)}")
        return values

    def to_annotation(self, default_spacing: Optional[float] = None) -> LesionAnnotation:
        """Domain annotation; SAD is derived from RECIST and spacing when missing."""
        recist = RecistMeasurement.from_flat(tuple(self.recist)) if self.recist else None
        sad = self.sad_mm
        spacing = self.spacing_mm_px if self.spacing_mm_px is not None else default_spacing
        if sad is None and recist is not None and spacing is not None:
            sad = short_axis_mm(recist, spacing)
        return LesionAnnotation(
            image_id=self.image_id,
            box=Box(x1=self.x1, y1=self.y1, x2=self.x2, y2=self.y2),
            label=self.label,
            recist=recist,
            sad_mm=sad,
            lesion_id=self.lesion_id,
        )

    @classmethod
    def from_annotation(
        cls, ann: LesionAnnotation, spacing_mm_px: Optional[float] = None
    ) -> "AnnotationRecord":
        return cls(
            image_id=ann.image_id,
            x1=ann.box.x1,
            y1=ann.box.y1,
            x2=ann.box.x2,
            y2=ann.box.y2,
            label=ann.label,
            recist=list(ann.recist.flat()) if ann.recist else None,
            sad_mm=ann.sad_mm,
            spacing_mm_px=spacing_mm_px,
            lesion_id=ann.lesion_id,
        )


# =============================================================================
# JSONL
# =============================================================================


def iter_records(path: PathLike, record_type: Type[R]) -> Iterator[Tuple[int, R]]:
    """Yield (line number, record) for every non-blank line."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, record_type.model_validate_json(line)
            except ValidationError as e:
                raise RecordParseError(format_validation_error(e), path=path, line=lineno) from e


def _convert(path: Path, lineno: int, fn: Callable[[], T]) -> T:
    try:
        return fn()
    except (ValidationError, ValueError) as e:
        message = format_validation_error(e) if isinstance(e, ValidationError) else str(e)
        raise RecordParseError(message, path=path, line=lineno) from e


def read_detections(path: PathLike, default_model: Optional[str] = None) -> List[Detection]:
    """Parse a detection JSONL file; records without ``model`` get the file stem."""
    path = Path(path)
    model = default_model or path.stem
    dets = [
        _convert(path, lineno, lambda rec=rec: rec.to_detection(model))
        for lineno, rec in iter_records(path, DetectionRecord)
    ]
    logger.debug(f"Read {len(dets)} detections from {path}")
    return dets


def read_annotations(
    path: PathLike, default_spacing: Optional[float] = None
) -> List[LesionAnnotation]:
    path = Path(path)
    anns = [
        _convert(path, lineno, lambda rec=rec: rec.to_annotation(default_spacing))
        for lineno, rec in iter_records(path, AnnotationRecord)
    ]
    logger.debug(f"Read {len(anns)} annotations from {path}")
    return anns


def write_records(records: Iterable[BaseModel], path: PathLike) -> Path:
    """Write one compact JSON object per line; unset optional fields are omitted."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(record.model_dump_json(exclude_none=True))
            handle.write("\n")
    return path


def write_detections(dets: Iterable[Detection], path: PathLike) -> Path:
    return write_records((DetectionRecord.from_detection(d) for d in dets), path)


def write_annotations(
    anns: Iterable[LesionAnnotation], path: PathLike, spacing_mm_px: Optional[float] = None
) -> Path:
    return write_records((AnnotationRecord.from_annotation(a, spacing_mm_px) for a in anns), path)


def write_manifest(manifest: SceneManifest, path: PathLike) -> Path:
    return write_records(manifest.images, path)


class _ManifestLine(BaseModel):
    model_config = ConfigDict(extra="ignore")

    image_id: str = Field(min_length=1)


def read_manifest(path: PathLike) -> List[str]:
    """Image ids of a manifest file (one JSON object with ``image_id`` per line)."""
    return [rec.image_id for _, rec in iter_records(path, _ManifestLine)]


def read_many(paths: Sequence[PathLike], reader: Callable[[PathLike], T], threads: int = 1) -> List[T]:
    """Apply ``reader`` to every path, in order; files are parsed in parallel when threads > 1."""
    if threads > 1 and len(paths) > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(paths))) as pool:
            return list(pool.map(reader, paths))
    return [reader(p) for p in paths]


__all__ = [
    "AnnotationRecord",
    "DetectionRecord",
    "read_annotations",
    "read_detections",
    "read_manifest",
    "read_many",
    "write_annotations",
    "write_detections",
    "write_manifest",
    "write_records",
]
