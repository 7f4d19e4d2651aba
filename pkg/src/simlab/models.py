"""Configuration types for the synthetic scene and detector simulator."""

from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from evaluation.models import EvaluationConfig
from fusion.models import FusionConfig


class SadComponent(BaseModel):
    """One Gaussian component of the short-axis diameter mixture, in mm."""

    model_config = ConfigDict(frozen=True)

    weight: float = Field(gt=0.0)
    mean_mm: float = Field(gt=0.0)
    sd_mm: float = Field(default=0.0, ge=0.0)


def _default_mixture() -> List[SadComponent]:
    # one component per size bin
    return [
        SadComponent(weight=0.35, mean_mm=7.0, sd_mm=1.5),
        SadComponent(weight=0.45, mean_mm=18.0, sd_mm=5.0),
        SadComponent(weight=0.20, mean_mm=40.0, sd_mm=8.0),
    ]


class SceneConfig(BaseModel):
    """Synthetic ground truth: images, lesion counts and sizes."""

    model_config = ConfigDict(frozen=True)

    seed: int = Field(default=42, ge=0)
    n_images: int = Field(default=200, ge=1)
    image_width: int = Field(default=512, gt=0)
    image_height: int = Field(default=512, gt=0)
    lesions_per_image: Tuple[int, int] = Field(default=(1, 3))
    sad_mixture: List[SadComponent] = Field(default_factory=_default_mixture, min_length=1)
    min_sad_mm: float = Field(default=2.0, gt=0.0)
    max_sad_mm: float = Field(default=80.0, gt=0.0)
    long_axis_ratio: Tuple[float, float] = Field(
        default=(1.0, 1.8), description="Long axis = short axis x U(lo, hi)"
    )
    pixel_spacing_mm: float = Field(default=0.8, gt=0.0)
    recist_pad_px: float = Field(default=5.0, ge=0.0)
    image_prefix: str = Field(default="sim", min_length=1)

    @model_validator(mode="after")
    def _check_ranges(self) -> "SceneConfig":
        lo, hi = self.lesions_per_image
        if lo < 0 or hi < lo:
            raise ValueError(f"lesions_per_image must satisfy 0 <= min <= max, got {(lo, hi)}")
        if self.max_sad_mm < self.min_sad_mm:
            raise ValueError("max_sad_mm must be >= min_sad_mm")
        r_lo, r_hi = self.long_axis_ratio
        if r_lo < 1.0 or r_hi < r_lo:
            raise ValueError("long_axis_ratio must satisfy 1 <= lo <= hi")
        return self


class DetectorProfile(BaseModel):
    """Error model of one simulated detector."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1)
    jitter_px: float = Field(default=2.0, ge=0.0, description="Per-corner Gaussian sigma")
    miss_prob: float = Field(default=0.1, ge=0.0, le=1.0)
    fp_rate: float = Field(default=2.0, ge=0.0, description="Poisson mean of FPs per image")
    tp_score_mean: float = Field(default=0.8, ge=0.0, le=1.0)
    tp_score_sd: float = Field(default=0.1, ge=0.0)
    fp_score_mean: float = Field(default=0.3, ge=0.0, le=1.0)
    fp_score_sd: float = Field(default=0.15, ge=0.0)


class ImageInfo(BaseModel):
    """One entry of the image manifest."""

    model_config = ConfigDict(frozen=True)

    image_id: str
    width: int
    height: int
    pixel_spacing_mm: float


class SceneManifest(BaseModel):
    """Every evaluated image, including those without lesions."""

    images: List[ImageInfo] = Field(default_factory=list)

    @property
    def image_ids(self) -> List[str]:
        return [image.image_id for image in self.images]


class SimulationConfig(BaseModel):
    """JSON config for ``lesionfuse simulate`` and ``lesionfuse experiment``."""

    scene: SceneConfig = Field(default_factory=SceneConfig)
    detectors: List[DetectorProfile] = Field(min_length=1)
    fusion: FusionConfig = Field(default_factory=FusionConfig)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)
