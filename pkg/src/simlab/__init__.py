"""Synthetic lesions and simulated detectors for desk-scale ensemble experiments."""

from simlab.detector import simulate_detector
from simlab.experiment import ExperimentReport, ensemble_experiment
from simlab.models import (
    DetectorProfile,
    ImageInfo,
    SadComponent,
    SceneConfig,
    SceneManifest,
    SimulationConfig,
)
from simlab.scene import gen_scene

__all__ = [
    # Models
    "DetectorProfile",
    "ImageInfo",
    "SadComponent",
    "SceneConfig",
    "SceneManifest",
    "SimulationConfig",
    "ExperimentReport",
    # Operations
    "gen_scene",
    "simulate_detector",
    "ensemble_experiment",
]
