"""Fusion of clustered predictions from several detector runs."""

from fusion.ensemble import fuse_runs, fuse_two_stage, nms_runs
from fusion.models import Cluster, ClusterMember, DetectionRun, FusionConfig, RescaleMode
from fusion.nms import nms
from fusion.wbf import fuse_clusters, weighted_boxes_fusion

__all__ = [
    # Models
    "Cluster",
    "ClusterMember",
    "DetectionRun",
    "FusionConfig",
    "RescaleMode",
    # Single image
    "weighted_boxes_fusion",
    "fuse_clusters",
    "nms",
    # Whole runs
    "fuse_runs",
    "fuse_two_stage",
    "nms_runs",
]
