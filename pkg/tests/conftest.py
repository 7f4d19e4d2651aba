"""Pytest configuration and shared fixtures for LesionFuse tests."""

import json
import os
import sys
import warnings
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, Optional

import numpy as np
import pytest

# Add src to path for imports
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from boxcore.models import Box, Detection, LesionAnnotation, RecistMeasurement  # noqa: E402
from core.config import reload_config  # noqa: E402
from ctprep.models import SliceVolume  # noqa: E402


# =============================================================================
# Builders
# =============================================================================

@pytest.fixture
def make_det() -> Callable[..., Detection]:
    """Build a detection from xyxy coordinates."""

    def _make(
        x1: float,
        y1: float,
        x2: float,
        y2: float,
        score: float = 0.9,
        image_id: str = "img0",
        model: str = "m1",
        epoch: Optional[int] = None,
        label: int = 0,
    ) -> Detection:
        return Detection(
            image_id=image_id,
            box=Box(x1=x1, y1=y1, x2=x2, y2=y2),
            score=score,
            label=label,
            source_model=model,
            source_epoch=epoch,
        )

    return _make


@pytest.fixture
def make_gt() -> Callable[..., LesionAnnotation]:
    """Build an annotation from xyxy coordinates."""

    def _make(
        x1: float,
        y1: float,
        x2: float,
        y2: float,
        image_id: str = "img0",
        sad_mm: Optional[float] = None,
        label: int = 0,
        lesion_id: Optional[str] = None,
    ) -> LesionAnnotation:
        return LesionAnnotation(
            image_id=image_id,
            box=Box(x1=x1, y1=y1, x2=x2, y2=y2),
            sad_mm=sad_mm,
            label=label,
            lesion_id=lesion_id,
        )

    return _make


@pytest.fixture
def cross_recist() -> RecistMeasurement:
    """Long axis (0,5)-(10,5), short axis (5,0)-(5,10)."""
    return RecistMeasurement(long_axis=((0.0, 5.0), (10.0, 5.0)), short_axis=((5.0, 0.0), (5.0, 10.0)))


@pytest.fixture
def small_volume() -> SliceVolume:
    """Three 8x8 slices with a horizontal HU ramp and the lung window."""
    ramp = np.linspace(-1500, 500, 64).reshape(8, 8).round().astype(np.int16)
    slices = np.stack([ramp, ramp + 10, ramp - 10]).astype(np.int16)
    return SliceVolume(
        slices=slices,
        windows=[(-1500.0, 500.0)] * 3,
        pixel_spacing_mm=0.8,
        slice_spacing_mm=2.0,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240521)


@pytest.fixture(autouse=True)
def _clean_config(monkeypatch: pytest.MonkeyPatch) -> Iterator[None]:
    """Every test starts from built-in defaults, not the developer's environment."""
    for name in list(os.environ):
        if name.upper().startswith("LESIONFUSE_"):
            monkeypatch.delenv(name, raising=False)
    reload_config()
    yield
    # drop the test's env vars before re-reading, or an invalid value fails teardown
    monkeypatch.undo()
    reload_config()


# =============================================================================
# Frozen regression values
# =============================================================================

FROZEN_FILE = Path(__file__).parent / "fixtures" / "regression.json"


class FrozenValues:
    """Seeded results committed in tests/fixtures/regression.json.

    A key missing from the file is recorded on first use and compared on every
    later run; ``--refreeze`` rewrites all keys. Floats compare to 1e-9.
    """

    def __init__(self, path: Path, refreeze: bool = False):
        self.path = path
        self.refreeze = refreeze
        self.values: Dict[str, Any] = (
            json.loads(path.read_text(encoding="utf-8")) if path.exists() else {}
        )
        self.recorded: list = []

    def check(self, key: str, value: Any) -> None:
        if self.refreeze or key not in self.values:
            self.values[key] = value
            self.recorded.append(key)
            warnings.warn(f"recorded frozen value {key} = {value!r}", stacklevel=2)
            return
        expected = self.values[key]
        if isinstance(value, float) or (
            isinstance(value, list) and all(isinstance(v, float) for v in value)
        ):
            assert value == pytest.approx(expected, rel=0.0, abs=1e-9), key
        else:
            assert value == expected, key

    def save(self) -> None:
        if not self.recorded:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(self.values, indent=2, sort_keys=True)
        self.path.write_text(text + "\n", encoding="utf-8")


@pytest.fixture(scope="session")
def frozen(request: pytest.FixtureRequest) -> Iterator[FrozenValues]:
    """Frozen regression values, shared by the whole session."""
    values = FrozenValues(FROZEN_FILE, refreeze=request.config.getoption("--refreeze"))
    yield values
    values.save()


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption(
        "--refreeze",
        action="store_true",
        default=False,
        help="Rewrite tests/fixtures/regression.json from this run",
    )


# =============================================================================
# Pytest Markers
# =============================================================================

def pytest_configure(config: pytest.Config) -> None:
    """Register custom markers."""
    config.addinivalue_line("markers", "unit: mark test as unit test (pure, fast)")
    config.addinivalue_line("markers", "integration: mark test as integration test (runs the CLI)")
    config.addinivalue_line("markers", "slow: mark test as slow (timing or large simulations)")
