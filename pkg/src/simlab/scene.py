"""Seeded synthetic ground truth.

Every random draw comes from numpy's PCG64 generator seeded with the sequence
``[seed, stream, image_index]``, so each image can be generated independently
and reproduces on any platform.
"""

import math
from typing import List, Tuple

import numpy as np
from loguru import logger

from boxcore.geometry import recist_to_box
from boxcore.models import Box, LesionAnnotation, RecistMeasurement
from core.errors import InputValidationError
from simlab.models import ImageInfo, SceneConfig, SceneManifest

SCENE_STREAM = 0


def image_rng(seed: int, stream: int, image_index: int) -> np.random.Generator:
    """Generator for one (seed, stream, image) triple."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream, image_index])))


def max_box_extent_px(cfg: SceneConfig) -> float:
    """Largest box side any sampled lesion can produce."""
    return cfg.max_sad_mm * cfg.long_axis_ratio[1] / cfg.pixel_spacing_mm + 2 * cfg.recist_pad_px


def check_scene_fits(cfg: SceneConfig) -> None:
    extent = max_box_extent_px(cfg)
    if extent > min(cfg.image_width, cfg.image_height):
        raise InputValidationError(
            f"image {cfg.image_width}x{cfg.image_height}px is too small for lesions up to "
            f"{cfg.max_sad_mm}mm (box side up to {extent:.1f}px)"
        )


def sample_sad(rng: np.random.Generator, cfg: SceneConfig) -> float:
    weights = np.array([c.weight for c in cfg.sad_mixture], dtype=np.float64)
    comp = cfg.sad_mixture[int(rng.choice(len(weights), p=weights / weights.sum()))]
    sad = rng.normal(comp.mean_mm, comp.sd_mm)
    return float(np.clip(sad, cfg.min_sad_mm, cfg.max_sad_mm))


def sample_lesion(
    rng: np.random.Generator, cfg: SceneConfig, width: int, height: int
) -> Tuple[RecistMeasurement, Box, float]:
    """Random RECIST cross placed so its padded box lies inside the image."""
    sad = sample_sad(rng, cfg)
    ratio = rng.uniform(*cfg.long_axis_ratio)
    theta = rng.uniform(0.0, math.pi)

    short_px = sad / cfg.pixel_spacing_mm
    long_px = short_px * ratio
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    half_x = max(abs(long_px / 2 * cos_t), abs(short_px / 2 * sin_t)) + cfg.recist_pad_px
    half_y = max(abs(long_px / 2 * sin_t), abs(short_px / 2 * cos_t)) + cfg.recist_pad_px
    cx = rng.uniform(half_x, width - half_x)
    cy = rng.uniform(half_y, height - half_y)

    lx, ly = long_px / 2 * cos_t, long_px / 2 * sin_t
    sx, sy = -short_px / 2 * sin_t, short_px / 2 * cos_t
    recist = RecistMeasurement(
        long_axis=((cx - lx, cy - ly), (cx + lx, cy + ly)),
        short_axis=((cx - sx, cy - sy), (cx + sx, cy + sy)),
    )
    box = clip_box(recist_to_box(recist, cfg.recist_pad_px), width, height)
    return recist, box, sad


def clip_box(box: Box, width: float, height: float) -> Box:
    x1 = min(max(box.x1, 0.0), width)
    y1 = min(max(box.y1, 0.0), height)
    x2 = min(max(box.x2, x1), width)
    y2 = min(max(box.y2, y1), height)
    return Box(x1=x1, y1=y1, x2=x2, y2=y2)


def _scene_image(cfg: SceneConfig, index: int) -> Tuple[ImageInfo, List[LesionAnnotation]]:
    rng = image_rng(cfg.seed, SCENE_STREAM, index)
    image_id = f"{cfg.image_prefix}{index:05d}"
    lo, hi = cfg.lesions_per_image
    count = int(rng.integers(lo, hi + 1))
    lesions = []
    for j in range(count):
        recist, box, sad = sample_lesion(rng, cfg, cfg.image_width, cfg.image_height)
        lesions.append(
            LesionAnnotation(
                image_id=image_id,
                box=box,
                recist=recist,
                sad_mm=sad,
                lesion_id=f"{image_id}-L{j}",
            )
        )
    info = ImageInfo(
        image_id=image_id,
        width=cfg.image_width,
        height=cfg.image_height,
        pixel_spacing_mm=cfg.pixel_spacing_mm,
    )
    return info, lesions


def gen_scene(cfg: SceneConfig) -> Tuple[List[LesionAnnotation], SceneManifest]:
    """Generate annotations and the image manifest for a scene.

    Deterministic for a given config: image i only depends on (seed, i).

    Raises:
        InputValidationError: if the largest possible lesion box cannot fit the image.
    """
    check_scene_fits(cfg)
    annotations: List[LesionAnnotation] = []
    images: List[ImageInfo] = []
    for index in range(cfg.n_images):
        info, lesions = _scene_image(cfg, index)
        images.append(info)
        annotations.extend(lesions)
    logger.info(
        f"Generated scene seed={cfg.seed}: {len(images)} images, {len(annotations)} lesions"
    )
    return annotations, SceneManifest(images=images)

