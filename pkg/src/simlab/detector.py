"""Noisy detector simulator standing in for trained networks."""

import zlib
from typing import Dict, List, Sequence

import numpy as np
from loguru import logger

from boxcore.models import Box, Detection, LesionAnnotation
from simlab.models import DetectorProfile, SceneConfig, SceneManifest
from simlab.scene import clip_box, image_rng, sample_lesion


def detector_stream(profile: DetectorProfile) -> int:
    """Stable stream id derived from the detector name.

    Equal names give equal streams, so a profile duplicated under the same name
    reproduces the same detections.
    """
    return zlib.crc32(profile.name.encode("utf-8")) + 1


def _clipped_score(rng: np.random.Generator, mean: float, sd: float) -> float:
    return float(np.clip(rng.normal(mean, sd), 0.0, 1.0))


def _jittered(box: Box, offsets: np.ndarray, width: float, height: float) -> Box:
    xa, xb = box.x1 + float(offsets[0]), box.x2 + float(offsets[2])
    ya, yb = box.y1 + float(offsets[1]), box.y2 + float(offsets[3])
    # independent corner noise can swap edges; re-sort before clipping
    return clip_box(
        Box(x1=min(xa, xb), y1=min(ya, yb), x2=max(xa, xb), y2=max(ya, yb)), width, height
    )


def simulate_detector(
    annotations: Sequence[LesionAnnotation],
    manifest: SceneManifest,
    profile: DetectorProfile,
    scene: SceneConfig,
    seed: int,
) -> List[Detection]:
    """Emit jittered true positives and Poisson false positives for every image.

    For each lesion the simulator always draws (miss, 4 corner offsets, score) so
    changing one profile parameter does not shift the other draws. With
    probability ``1 - miss_prob`` the jittered box is emitted. Each image then
    gets Poisson(``fp_rate``) false positives placed uniformly, sized like lesions.
    """
    by_image: Dict[str, List[LesionAnnotation]] = {}
    for ann in annotations:
        by_image.setdefault(ann.image_id, []).append(ann)

    stream = detector_stream(profile)
    out: List[Detection] = []
    n_fp = 0
    for index, image in enumerate(manifest.images):
        rng = image_rng(seed, stream, index)
        for ann in by_image.get(image.image_id, []):
            missed = rng.random() < profile.miss_prob
            offsets = rng.normal(0.0, profile.jitter_px, size=4)
            score = _clipped_score(rng, profile.tp_score_mean, profile.tp_score_sd)
            if missed:
                continue
            out.append(
                Detection(
                    image_id=image.image_id,
                    box=_jittered(ann.box, offsets, image.width, image.height),
                    score=score,
                    label=ann.label,
                    source_model=profile.name,
                )
            )

        for _ in range(int(rng.poisson(profile.fp_rate))):
            _, box, _ = sample_lesion(rng, scene, image.width, image.height)
            out.append(
                Detection(
                    image_id=image.image_id,
                    box=box,
                    score=_clipped_score(rng, profile.fp_score_mean, profile.fp_score_sd),
                    source_model=profile.name,
                )
            )
            n_fp += 1

    logger.info(
        f"Simulated {profile.name}: {len(out)} detections ({n_fp} false positives) "
        f"over {len(manifest.images)} images"
    )
    return out
