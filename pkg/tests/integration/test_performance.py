"""Timing checks for fuse and eval at 10,000 detections over 1,000 images."""

import time

import numpy as np
import pytest

from boxcore.models import Box, Detection, LesionAnnotation
from cli_tools.records import write_annotations, write_detections
from core.cli import main
from core.registry import EXIT_OK

N_IMAGES = 1000
DETS_PER_IMAGE = 10


@pytest.fixture(scope="module")
def large_inputs(tmp_path_factory):
    rng = np.random.default_rng(2024)
    root = tmp_path_factory.mktemp("perf")
    runs = {f"model{k}": [] for k in range(3)}
    annotations = []
    names = list(runs)
    for i in range(N_IMAGES):
        image_id = f"img{i:04d}"
        x, y = rng.uniform(0, 400, size=2)
        annotations.append(
            LesionAnnotation(image_id=image_id, box=Box(x1=x, y1=y, x2=x + 40, y2=y + 40), sad_mm=15.0)
        )
        for j in range(DETS_PER_IMAGE):
            dx, dy = rng.normal(0, 3, size=2) if j < 3 else rng.uniform(-300, 300, size=2)
            x1 = float(np.clip(x + dx, 0, 470))
            y1 = float(np.clip(y + dy, 0, 470))
            runs[names[j % 3]].append(
                Detection(
                    image_id=image_id,
                    box=Box(x1=x1, y1=y1, x2=x1 + 40, y2=y1 + 40),
                    score=float(rng.uniform()),
                    source_model=names[j % 3],
                )
            )
    paths = [write_detections(dets, root / f"{name}.jsonl") for name, dets in runs.items()]
    gt = write_annotations(annotations, root / "gt.jsonl")
    return root, paths, gt


@pytest.mark.integration
@pytest.mark.slow
class TestPerformance:
    """Wall-clock limits for the two hot commands."""

    def test_fuse_under_one_second(self, large_inputs):
        root, paths, _ = large_inputs
        start = time.perf_counter()
        assert main(["fuse", *map(str, paths), "--out", str(root / "fused.jsonl")]) == EXIT_OK
        assert time.perf_counter() - start < 1.0

    def test_eval_under_two_seconds(self, large_inputs):
        root, paths, gt = large_inputs
        merged = root / "all.jsonl"
        merged.write_text("".join(p.read_text(encoding="utf-8") for p in paths), encoding="utf-8")
        start = time.perf_counter()
        assert main(["eval", str(merged), str(gt), "--stratify"]) == EXIT_OK
        assert time.perf_counter() - start < 2.0
