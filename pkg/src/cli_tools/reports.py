"""Report documents and their table renderings.

A ``ReportDocument`` is the JSON written by ``lesionfuse eval``. The table is a
pandas frame with columns ``method, mAP, S@0.5 ... S@16``, percentages with two
decimals, and ``--`` for size bins that hold no lesions.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import pandas as pd
from pydantic import BaseModel, Field

from core import FORMAT_VERSION, __version__
from evaluation.models import EvalReport, FrocCurve
from simlab.experiment import ExperimentReport

PathLike = Union[str, Path]

SCHEMA_FILE = Path(__file__).resolve().parents[2] / "schemas" / "report.schema.json"

AP_METHOD = "all-point interpolated precision envelope (VOC 2010+), averaged over labels"
EMPTY_CELL = "--"


class ReportDocument(BaseModel):
    """JSON document written by ``lesionfuse eval``."""

    toolkit_version: str = Field(default=__version__)
    format_version: str = Field(default=FORMAT_VERSION)
    ap_method: str = Field(default=AP_METHOD, description="How AP is integrated")
    config: Dict[str, Any] = Field(default_factory=dict, description="Echo of the options used")
    report: EvalReport


class ExperimentDocument(BaseModel):
    """JSON document written by ``lesionfuse experiment``."""

    toolkit_version: str = Field(default=__version__)
    format_version: str = Field(default=FORMAT_VERSION)
    ap_method: str = Field(default=AP_METHOD)
    experiment: ExperimentReport


def report_schema() -> Dict[str, Any]:
    """JSON Schema every ``ReportDocument`` validates against."""
    return ReportDocument.model_json_schema()


def load_shipped_schema(path: PathLike = SCHEMA_FILE) -> Dict[str, Any]:
    """The committed report schema, kept in step with ``report_schema``."""
    schema: Dict[str, Any] = json.loads(Path(path).read_text(encoding="utf-8"))
    return schema


def format_target(target: float) -> str:
    return f"S@{target:g}"


def table_columns(fp_targets: Sequence[float]) -> List[str]:
    return ["method", "mAP", *[format_target(t) for t in fp_targets]]


def _percent(value: float) -> str:
    return f"{100.0 * value:.2f}"


def _row(report: EvalReport) -> Dict[str, str]:
    row = {"method": report.method, "mAP": _percent(report.mean_ap)}
    for target, sensitivity in zip(report.fp_targets, report.sensitivities):
        row[format_target(target)] = _percent(sensitivity)
    return row


def table_frame(reports: Sequence[EvalReport], include_bins: bool = True) -> pd.DataFrame:
    """Stack reports (and their size-bin sub-reports) into one table."""
    if not reports:
        return pd.DataFrame(columns=table_columns(()))
    columns = table_columns(reports[0].fp_targets)
    rows: List[Dict[str, str]] = []
    for report in reports:
        rows.append(_row(report))
        if not include_bins:
            continue
        for entry in report.bins:
            if entry.report is not None:
                rows.append(_row(entry.report))
            else:
                label = f"{report.method} ({entry.size_bin.row_label})"
                rows.append({"method": label, **{c: EMPTY_CELL for c in columns[1:]}})
    return pd.DataFrame(rows, columns=columns)


def write_table_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def render_table(frame: pd.DataFrame) -> str:
    """Plain-text table for the terminal."""
    return frame.to_string(index=False)


def froc_frame(curve: FrocCurve) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "threshold": curve.thresholds,
            "fp_per_image": curve.fp_per_image,
            "sensitivity": curve.sensitivity,
        },
        columns=["threshold", "fp_per_image", "sensitivity"],
    )


def write_froc_csv(curve: FrocCurve, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    froc_frame(curve).to_csv(path, index=False, lineterminator="\n")
    return path


def write_json(document: BaseModel, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(document.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def load_report_document(path: PathLike) -> ReportDocument:
    return ReportDocument.model_validate_json(Path(path).read_text(encoding="utf-8"))


def config_echo(**options: Optional[Any]) -> Dict[str, Any]:
    """Options as JSON-friendly values; paths become strings, unset options are dropped."""
    echo: Dict[str, Any] = {}
    for key, value in options.items():
        if value is None:
            continue
        echo[key] = str(value) if isinstance(value, Path) else value
    return echo
