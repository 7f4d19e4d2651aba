"""Detection evaluation: matching, FROC, average precision and size strata."""

from evaluation.froc import (
    fp_at_sensitivity,
    froc,
    froc_curve,
    precisions_at,
    sensitivities_at,
)
from evaluation.matching import match
from evaluation.models import (
    DEFAULT_FP_TARGETS,
    BinReport,
    EvalReport,
    EvaluationConfig,
    FrocCurve,
    MatchedDetection,
    MatchResult,
    PrecisionSummary,
)
from evaluation.precision import average_precision
from evaluation.stratify import count_images, evaluate, resolve_sad, stratified_report

__all__ = [
    # Models
    "DEFAULT_FP_TARGETS",
    "BinReport",
    "EvalReport",
    "EvaluationConfig",
    "FrocCurve",
    "MatchedDetection",
    "MatchResult",
    "PrecisionSummary",
    # Operations
    "match",
    "froc",
    "froc_curve",
    "sensitivities_at",
    "precisions_at",
    "fp_at_sensitivity",
    "average_precision",
    "evaluate",
    "stratified_report",
    "resolve_sad",
    "count_images",
]
