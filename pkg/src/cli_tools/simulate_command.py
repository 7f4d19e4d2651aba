"""``lesionfuse simulate``: synthetic ground truth and detector outputs."""

import argparse
from collections import Counter
from pathlib import Path
from typing import Optional

from cli_tools.records import write_annotations, write_detections, write_manifest
from core.errors import InputValidationError
from core.registry import CommandResult, cli
from simlab.detector import simulate_detector
from simlab.models import SimulationConfig
from simlab.scene import gen_scene


def load_simulation_config(path: Path, seed: Optional[int] = None) -> SimulationConfig:
    """Read a JSON simulation config, optionally overriding the scene seed."""
    config = SimulationConfig.model_validate_json(Path(path).read_text(encoding="utf-8"))
    if seed is not None:
        scene = config.scene.model_copy(update={"seed": seed})
        config = config.model_copy(update={"scene": scene})
    return config


def detection_path(prefix: str, detector: str) -> Path:
    return Path(f"{prefix}{detector}.jsonl")


def _configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", type=Path, help="Simulation config JSON")
    parser.add_argument("--seed", type=int, default=None, help="Override scene.seed")
    parser.add_argument("--out-gt", type=Path, required=True, help="Ground-truth JSONL")
    parser.add_argument(
        "--out-dets",
        required=True,
        metavar="PREFIX",
        help="Detection files are written to PREFIX<detector name>.jsonl",
    )
    parser.add_argument("--out-manifest", type=Path, default=None, help="Image manifest JSONL")


@cli.command("simulate", help="Generate a synthetic scene and simulated detector runs", configure=_configure)
def cmd_simulate(args: argparse.Namespace) -> CommandResult:
    config = load_simulation_config(args.config, args.seed)
    names = Counter(profile.name for profile in config.detectors)
    repeated = sorted(name for name, n in names.items() if n > 1)
    if repeated:
        raise InputValidationError(f"detectors: names must be unique, repeated: {repeated}")

    scene = config.scene
    annotations, manifest = gen_scene(scene)
    write_annotations(annotations, args.out_gt, spacing_mm_px=scene.pixel_spacing_mm)
    if args.out_manifest:
        write_manifest(manifest, args.out_manifest)

    written = []
    for profile in config.detectors:
        dets = simulate_detector(annotations, manifest, profile, scene, seed=scene.seed)
        written.append(str(write_detections(dets, detection_path(args.out_dets, profile.name))))

    return CommandResult(
        success=True,
        message=(
            f"Simulated {len(manifest.images)} images, {len(annotations)} lesions and "
            f"{len(written)} detectors (seed {scene.seed})"
        ),
        data={"ground_truth": str(args.out_gt), "detections": written},
    )
