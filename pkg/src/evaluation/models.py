"""Result types for detection evaluation."""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from boxcore.models import Detection, LesionAnnotation, SizeBin

DEFAULT_FP_TARGETS: Tuple[float, ...] = (0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 16.0)


class EvaluationConfig(BaseModel):
    """Parameters shared by matching, FROC and report generation."""

    model_config = ConfigDict(frozen=True)

    match_iou: float = Field(default=0.5, gt=0.0, le=1.0)
    fp_targets: Tuple[float, ...] = Field(default=DEFAULT_FP_TARGETS, min_length=1)
    method_name: str = Field(default="detections", min_length=1)

    @field_validator("fp_targets")
    @classmethod
    def _sorted_targets(cls, targets: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(t < 0 for t in targets):
            raise ValueError("FP targets must be non-negative")
        return tuple(sorted(targets))


class MatchedDetection(BaseModel):
    """A detection with the outcome of matching."""

    model_config = ConfigDict(frozen=True)

    detection: Detection
    annotation: Optional[LesionAnnotation] = None
    annotation_index: Optional[int] = Field(default=None, description="Index into the gts input")
    is_tp: bool = False
    ignored: bool = Field(default=False, description="Best match was an ignored annotation")


class MatchResult(BaseModel):
    """Greedy matching of detections against annotations."""

    model_config = ConfigDict(frozen=True)

    per_image: Dict[str, List[MatchedDetection]] = Field(default_factory=dict)
    image_ids: List[str] = Field(default_factory=list, description="Images seen in either input")
    tp: int = 0
    fp: int = 0
    fn: int = 0
    n_ignored: int = 0
    n_annotations: int = Field(default=0, description="Annotations that count (not ignored)")
    annotations_per_label: Dict[int, int] = Field(default_factory=dict)
    iou_thresh: float = 0.5

    def scored(self) -> List[MatchedDetection]:
        """Non-ignored matched detections across all images."""
        return [m for image_id in sorted(self.per_image) for m in self.per_image[image_id]
                if not m.ignored]


class FrocCurve(BaseModel):
    """Operating points of a descending score-threshold sweep."""

    model_config = ConfigDict(frozen=True)

    thresholds: List[float] = Field(default_factory=list)
    fp_per_image: List[float] = Field(default_factory=list)
    sensitivity: List[float] = Field(default_factory=list)
    tp: List[int] = Field(default_factory=list)
    fp: List[int] = Field(default_factory=list)
    n_images: int = 1
    n_annotations: int = 0

    def __len__(self) -> int:
        return len(self.thresholds)


class PrecisionSummary(BaseModel):
    """Average precision per label and their mean."""

    model_config = ConfigDict(frozen=True)

    mean_ap: float
    ap_per_label: Dict[int, float] = Field(default_factory=dict)


class EvalReport(BaseModel):
    """Metrics for one method, optionally with size-stratified sub-reports."""

    method: str = "detections"
    n_images: int
    n_annotations: int
    n_detections: int
    n_ignored: int = 0
    tp: int
    fp: int
    fn: int
    mean_ap: float
    ap_per_label: Dict[int, float] = Field(default_factory=dict)
    fp_targets: List[float]
    sensitivities: List[float]
    precisions: List[float] = Field(default_factory=list)
    curve: Optional[FrocCurve] = Field(default=None, exclude=True)
    bins: List["BinReport"] = Field(default_factory=list)

    def sensitivity_at(self, target: float) -> float:
        for t, s in zip(self.fp_targets, self.sensitivities):
            if t == target:
                return s
        raise KeyError(f"no sensitivity reported at {target} FP/image")

    def bin_report(self, size_bin: SizeBin) -> Optional["EvalReport"]:
        for entry in self.bins:
            if entry.size_bin is size_bin:
                return entry.report
        return None


class BinReport(BaseModel):
    """Sub-report for one lesion size stratum; report is None when the bin is empty."""

    size_bin: SizeBin
    n_annotations: int
    report: Optional[EvalReport] = None

    @property
    def is_empty(self) -> bool:
        return self.report is None


EvalReport.model_rebuild()
