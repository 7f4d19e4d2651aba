"""Time the simulate -> fuse -> evaluate pipeline on a seeded scene.

Runs the default three-detector experiment and prints stage timings next to
the comparison table. Useful for checking fuse and eval timings on a new
machine.

Usage:
    python scripts/benchmark_pipeline.py [--images 1000] [--seed 42] [--threads 1]
"""

import argparse
import sys
import time
from pathlib import Path

# Add src to path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

try:
    from cli_tools.reports import render_table, table_frame
    from core.logging_config import setup_logging
    from evaluation.models import EvaluationConfig
    from evaluation.stratify import stratified_report
    from fusion.ensemble import fuse_runs
    from fusion.models import DetectionRun, FusionConfig
    from simlab.detector import simulate_detector
    from simlab.models import DetectorProfile, SceneConfig
    from simlab.scene import gen_scene
except ImportError as e:
    print(f"Import error: {e}")
    print(f"Python path: {sys.path}")
    sys.exit(1)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--images", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    setup_logging(level="WARNING")

    print("=" * 60)
    print("LesionFuse - Pipeline Benchmark")
    print("=" * 60)

    scene = SceneConfig(seed=args.seed, n_images=args.images)
    profiles = [DetectorProfile(name=n) for n in ("retinanet", "foveabox", "vfnet")]

    start = time.perf_counter()
    annotations, manifest = gen_scene(scene)
    runs = [
        DetectionRun(
            source_model=p.name,
            detections=simulate_detector(annotations, manifest, p, scene, seed=scene.seed),
        )
        for p in profiles
    ]
    simulated = time.perf_counter()
    n_dets = sum(len(r.detections) for r in runs)

    fused = fuse_runs(runs, FusionConfig(), args.threads)
    fused_at = time.perf_counter()

    def report(dets, method):
        cfg = EvaluationConfig(method_name=method)
        return stratified_report(dets, annotations, scene.pixel_spacing_mm, cfg, manifest.image_ids)

    reports = [report(r.detections, r.source_model) for r in runs]
    reports.append(report(fused, "Ensemble"))
    evaluated = time.perf_counter()

    print(f"images: {len(manifest.images)}  lesions: {len(annotations)}  detections: {n_dets}")
    print(f"simulate: {simulated - start:.3f}s")
    print(f"fuse:     {fused_at - simulated:.3f}s ({len(fused)} fused boxes)")
    print(f"evaluate: {evaluated - fused_at:.3f}s ({len(reports)} stratified reports)")
    print()
    print(render_table(table_frame(reports, include_bins=False)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
