"""Unit tests for CT windowing, normalization, equalization and slice stacking."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from core.errors import InputValidationError
from ctprep.models import SliceVolume
from ctprep.transforms import (
    hist_equalize,
    neighbor_indices,
    normalize_u8,
    stack_3slice,
    window_clip,
)

LUNG = (-1500.0, 500.0)

hu_rasters = arrays(np.int16, st.tuples(st.integers(1, 12), st.integers(1, 12)), elements=st.integers(-3000, 3000))
u8_rasters = arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12)))


def _volume(n: int, h: int = 4, w: int = 4) -> SliceVolume:
    slices = np.stack([np.full((h, w), -1000 + 100 * i, dtype=np.int16) for i in range(n)])
    slices[:, 0, 0] = -1500  # two values per slice so equalization is not a passthrough
    return SliceVolume(slices=slices, windows=[LUNG] * n)


@pytest.mark.unit
class TestWindowClip:
    """Tests for window_clip."""

    def test_examples(self):
        out = window_clip(np.array([-2000, 0, 9000]), LUNG)
        assert out.tolist() == [-1500, 0, 500]

    def test_bad_window(self):
        with pytest.raises(InputValidationError):
            window_clip(np.zeros((2, 2)), (500, 500))

    @given(hu_rasters)
    @settings(max_examples=100)
    def test_idempotent(self, raster):
        once = window_clip(raster, LUNG)
        assert np.array_equal(window_clip(once, LUNG), once)


@pytest.mark.unit
class TestNormalizeU8:
    """Tests for normalize_u8."""

    def test_endpoints(self):
        assert normalize_u8(np.array([-1500.0, 500.0]), LUNG).tolist() == [0, 255]

    def test_half_rounds_away_from_zero(self):
        assert normalize_u8(np.array([-500.0]), LUNG).tolist() == [128]

    def test_constant_at_low_end(self):
        out = normalize_u8(np.full((3, 3), -1500.0), LUNG)
        assert out.dtype == np.uint8
        assert not out.any()

    def test_value_outside_window(self):
        with pytest.raises(InputValidationError):
            normalize_u8(np.array([600.0]), LUNG)

    @given(hu_rasters)
    @settings(max_examples=100)
    def test_monotone(self, raster):
        clipped = window_clip(raster, LUNG).ravel()
        order = np.argsort(clipped, kind="stable")
        out = normalize_u8(clipped, LUNG)[order]
        assert np.all(np.diff(out.astype(int)) >= 0)


@pytest.mark.unit
class TestHistEqualize:
    """Tests for hist_equalize."""

    def test_single_value_passthrough(self):
        img = np.full((4, 4), 77, dtype=np.uint8)
        assert np.array_equal(hist_equalize(img), img)

    def test_two_values_stretch_to_extremes(self):
        img = np.array([[0, 1], [1, 0]], dtype=np.uint8)
        assert hist_equalize(img).tolist() == [[0, 255], [255, 0]]

    def test_rejects_non_uint8(self):
        with pytest.raises(InputValidationError):
            hist_equalize(np.zeros((2, 2), dtype=np.int16))

    @given(u8_rasters)
    @settings(max_examples=150)
    def test_extrema_and_monotone(self, img):
        out = hist_equalize(img)
        assert out.shape == img.shape
        if np.unique(img).size >= 2:
            assert out.min() == 0 and out.max() == 255
        flat_in, flat_out = img.ravel(), out.ravel()
        order = np.argsort(flat_in, kind="stable")
        assert np.all(np.diff(flat_out[order].astype(int)) >= 0)


@pytest.mark.unit
class TestStack3Slice:
    """Tests for neighbor_indices and stack_3slice."""

    @pytest.mark.parametrize(
        "n, key, expected",
        [(3, 1, (0, 1, 2)), (1, 0, (0, 0, 0)), (5, 4, (3, 4, 4)), (5, 0, (0, 0, 1))],
    )
    def test_neighbors(self, n, key, expected):
        assert neighbor_indices(n, key) == expected

    @pytest.mark.parametrize("key", [-1, 3])
    def test_out_of_range(self, key):
        with pytest.raises(InputValidationError):
            neighbor_indices(3, key)

    def test_single_slice_channels_identical(self):
        image = stack_3slice(_volume(1), 0)
        px = image.pixels
        assert px.shape == (4, 4, 3)
        assert np.array_equal(px[..., 0], px[..., 1]) and np.array_equal(px[..., 1], px[..., 2])

    def test_extrema_per_channel(self, small_volume):
        px = stack_3slice(small_volume, 1).pixels
        for c in range(3):
            assert px[..., c].min() == 0 and px[..., c].max() == 255

    def test_provenance(self, small_volume):
        image = stack_3slice(small_volume, 0, equalize=False)
        assert image.provenance.source_slices == (0, 0, 1)
        assert image.provenance.windows == (LUNG, LUNG, LUNG)
        assert image.provenance.equalized is False

    def test_deterministic(self, small_volume):
        a = stack_3slice(small_volume, 1).pixels
        b = stack_3slice(small_volume, 1).pixels
        assert a.tobytes() == b.tobytes()

    def test_per_slice_windows(self):
        slices = np.zeros((2, 2, 2), dtype=np.int16)
        slices[:, 0, 0] = 100
        vol = SliceVolume(slices=slices, windows=[(0, 100), (-100, 100)])
        px = stack_3slice(vol, 0, equalize=False).pixels
        assert px[0, 1, 1] == 0  # key slice: 0 HU at window low end
        assert px[0, 1, 2] == 128  # above: 0 HU in (-100, 100)


@pytest.mark.unit
class TestSliceVolume:
    """Tests for SliceVolume validation."""

    def test_window_count(self):
        with pytest.raises(InputValidationError):
            SliceVolume(slices=np.zeros((2, 2, 2), dtype=np.int16), windows=[LUNG])

    def test_unsigned_rejected(self):
        with pytest.raises(InputValidationError):
            SliceVolume(slices=np.zeros((1, 2, 2), dtype=np.uint16), windows=[LUNG])

    def test_inverted_window(self):
        with pytest.raises(InputValidationError):
            SliceVolume(slices=np.zeros((1, 2, 2), dtype=np.int16), windows=[(10, -10)])
