"""``lesionfuse preprocess``: one 3-slice, 8-bit image from a CT volume."""

import argparse
from pathlib import Path

from core.config import get_config
from core.registry import CommandResult, cli
from ctprep.raster_io import load_volume, save_prepared
from ctprep.transforms import stack_3slice


def _configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("volume", type=Path, help="Slice volume (.lfsv binary or .json)")
    parser.add_argument("--key-slice", type=int, required=True, help="Index of the annotated slice")
    parser.add_argument(
        "--out", type=Path, required=True, help="Output image; format from extension (.png, .ppm)"
    )
    parser.add_argument(
        "--no-equalize",
        dest="equalize",
        action="store_false",
        default=get_config().prep.equalize,
        help="Skip histogram equalization",
    )


@cli.command("preprocess", help="Window, normalize and stack CT slices into an RGB image", configure=_configure)
def cmd_preprocess(args: argparse.Namespace) -> CommandResult:
    volume = load_volume(args.volume)
    prepared = stack_3slice(volume, args.key_slice, equalize=args.equalize)
    image_path, sidecar = save_prepared(prepared, args.out)
    return CommandResult(
        success=True,
        message=f"Wrote {image_path} from slices {list(prepared.provenance.source_slices)}",
        data={"image": str(image_path), "provenance": str(sidecar)},
    )
