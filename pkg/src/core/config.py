"""Configuration management for LesionFuse."""

from pathlib import Path
from typing import List, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class FusionSettings(BaseSettings):
    """Defaults for box fusion."""

    iou_thresh: float = Field(
        default=0.55,
        gt=0.0,
        le=1.0,
        description="IoU above which a box joins an existing cluster",
    )
    score_thresh: float = Field(
        default=0.0,
        ge=0.0,
        le=1.0,
        description="Detections scoring below this are dropped before fusion",
    )
    rescale: str = Field(
        default="min_clamp",
        description="Consensus rescaling: min_clamp, proportional or none",
    )
    fused_model_name: str = Field(
        default="ensemble",
        description="source_model written on fused detections",
    )


class EvaluationSettings(BaseSettings):
    """Defaults for detection evaluation."""

    match_iou: float = Field(
        default=0.5,
        gt=0.0,
        le=1.0,
        description="Minimum IoU for a detection to hit an annotation",
    )
    fp_targets: List[float] = Field(
        default_factory=lambda: [0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 16.0],
        description="False positives per image at which sensitivity is reported",
    )
    method_name: str = Field(
        default="detections",
        description="Row label used in report tables",
    )


class PrepSettings(BaseSettings):
    """Defaults for CT slice preparation and RECIST geometry."""

    recist_pad_px: float = Field(
        default=5.0,
        ge=0.0,
        description="Padding added around RECIST endpoints when deriving boxes",
    )
    equalize: bool = Field(
        default=True,
        description="Histogram-equalize each channel after normalization",
    )


class LoggingConfig(BaseSettings):
    """Logging configuration."""

    level: str = Field(
        default="WARNING",
        description="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)",
    )
    log_file: Optional[Path] = Field(
        default=None,
        description="Path to log file. If None, logs only to stderr.",
    )
    rotation: str = Field(
        default="10 MB",
        description="Log rotation size",
    )
    retention: str = Field(
        default="1 week",
        description="Log retention period",
    )


class LesionFuseConfig(BaseSettings):
    """Main LesionFuse configuration."""

    model_config = SettingsConfigDict(
        env_prefix="LESIONFUSE_",
        env_file=".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )

    # Sub-configurations
    fusion: FusionSettings = Field(default_factory=FusionSettings)
    evaluation: EvaluationSettings = Field(default_factory=EvaluationSettings)
    prep: PrepSettings = Field(default_factory=PrepSettings)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    # General settings
    threads: int = Field(
        default=1,
        ge=1,
        description="Worker threads for per-image fusion and per-file parsing",
    )


# Global config instance
_config: Optional[LesionFuseConfig] = None


def get_config() -> LesionFuseConfig:
    """Get the global configuration instance."""
    global _config
    if _config is None:
        _config = LesionFuseConfig()
    return _config


def reload_config() -> LesionFuseConfig:
    """Reload configuration from environment/files."""
    global _config
    _config = LesionFuseConfig()
    return _config
