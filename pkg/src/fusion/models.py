"""Configuration and result types for box fusion."""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from boxcore.models import Detection


class RescaleMode(str, Enum):
    """How a fused score is scaled by the number of agreeing sources."""

    MIN_CLAMP = "min_clamp"
    PROPORTIONAL = "proportional"
    NONE = "none"


class FusionConfig(BaseModel):
    """Parameters of weighted boxes fusion."""

    model_config = ConfigDict(frozen=True)

    iou_thresh: float = Field(
        default=0.55,
        gt=0.0,
        le=1.0,
        description="A box joins the best cluster only if IoU with its fused box exceeds this",
    )
    score_thresh: float = Field(
        default=0.0,
        ge=0.0,
        le=1.0,
        description="Inputs scoring below this are dropped",
    )
    model_weights: Dict[str, float] = Field(
        default_factory=dict,
        description="Weight per source_model; unlisted models weigh 1.0",
    )
    rescale_mode: RescaleMode = Field(
        default=RescaleMode.MIN_CLAMP,
        description="Consensus rescaling of fused scores",
    )
    n_sources: Optional[int] = Field(
        default=None,
        ge=1,
        description="N, the number of contributing sources. None counts the sources in the input.",
    )
    fused_model_name: str = Field(
        default="ensemble",
        min_length=1,
        description="source_model stamped on fused detections",
    )
    ensemble_models: Tuple[str, ...] = Field(
        default=(),
        description=(
            "Every model of the ensemble; weights are normalized by their mean weight. "
            "Empty falls back to the models listed in model_weights."
        ),
    )

    @field_validator("model_weights")
    @classmethod
    def _positive_weights(cls, weights: Dict[str, float]) -> Dict[str, float]:
        bad = {name: w for name, w in weights.items() if not w > 0}
        if bad:
            raise ValueError(f"model weights must be positive: {bad}")
        return weights

    def weight_of(self, source_model: str) -> float:
        return self.model_weights.get(source_model, 1.0)

    def mean_weight(self) -> float:
        """Mean weight over the whole ensemble, the same for every image."""
        models = set(self.ensemble_models) or set(self.model_weights)
        if not models:
            return 1.0
        return sum(self.weight_of(m) for m in models) / len(models)


class ClusterMember(BaseModel):
    """A detection placed in a cluster together with its effective score."""

    model_config = ConfigDict(frozen=True)

    detection: Detection
    effective_score: float = Field(description="Score after model weighting")


class Cluster(BaseModel):
    """Detections merged into one fused detection."""

    model_config = ConfigDict(frozen=True)

    members: List[ClusterMember] = Field(min_length=1)
    fused: Detection

    @property
    def sources(self) -> List[Tuple[str, Optional[int]]]:
        """Distinct (model, epoch) tags contributing to the cluster."""
        return sorted(
            {m.detection.source for m in self.members},
            key=lambda tag: (tag[0], -1 if tag[1] is None else tag[1]),
        )


class DetectionRun(BaseModel):
    """All detections of one source (a model checkpoint) over a dataset."""

    model_config = ConfigDict(frozen=True)

    source_model: str = Field(min_length=1)
    source_epoch: Optional[int] = None
    detections: List[Detection] = Field(default_factory=list)

    @property
    def tag(self) -> Tuple[str, Optional[int]]:
        return (self.source_model, self.source_epoch)
