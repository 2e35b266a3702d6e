import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctcompand.core import CompandParams, HuSlice, LdrImage, ParamError, WindowSpec, normalize_to_unit
from ctcompand.ingest import clip_metal
from ctcompand.phantom import LESION_ROI, TOOTH_ROI
from ctcompand.render import (
    WINDOW_PRESETS,
    Roi,
    compand,
    contrast_metrics,
    load_png,
    quantize_output,
    save_png,
    window_render,
)
from oracles import mean_gradient, percentile_oracle, region_stats_oracle


def _slice_of(values):
    return HuSlice(np.asarray(values, dtype=np.float64))


class TestWindowRender:
    def test_center_of_window_maps_to_midgray(self):
        s = _slice_of(np.full((16, 16), 40.0))
        img = window_render(s, WindowSpec(level=40.0, width=400.0), bit_depth=8)
        assert img.values[0, 0] == 128  # (40 - (-160)) / 400 = 0.5 exactly

    def test_clamps_below_and_above(self):
        s = _slice_of(np.array([[-2000.0, 5000.0]] * 16).repeat(8, axis=0))
        img = window_render(s, WINDOW_PRESETS["soft"])
        assert img.values[0, 0] == 0
        assert img.values[0, 1] == 255

    def test_16_bit_output(self):
        s = _slice_of(np.full((16, 16), 400.0))
        img = window_render(s, WINDOW_PRESETS["bone"], bit_depth=16)
        assert img.bit_depth == 16
        assert img.values[0, 0] == 32768  # window center

    @given(a=st.floats(-2000, 4000), b=st.floats(-2000, 4000))
    def test_monotone_in_hu(self, a, b):
        w = WindowSpec(level=50.0, width=400.0)
        s = _slice_of(np.full((16, 16), 0.0))
        va = window_render(HuSlice(np.full((16, 16), a)), w).values[0, 0]
        vb = window_render(HuSlice(np.full((16, 16), b)), w).values[0, 0]
        if a <= b:
            assert va <= vb


class TestQuantize:
    def test_ramp_is_monotone_full_range(self):
        ramp = np.tile(np.linspace(0.0, 1.0, 256), (16, 1))
        img = quantize_output(ramp, 8, 0.0, 100.0)
        row = img.values[0]
        assert row[0] == 0 and row[-1] == 255
        assert (np.diff(row.astype(int)) >= 0).all()

    def test_constant_gives_midgray_and_warns(self):
        with pytest.warns(UserWarning, match="degenerate"):
            img = quantize_output(np.full((8, 8), 0.37), 8)
        assert (img.values == 128).all()
        with pytest.warns(UserWarning):
            img16 = quantize_output(np.full((8, 8), 0.37), 16)
        assert (img16.values == 32768).all()

    def test_percentile_endpoints_match_sort_oracle(self, rng):
        grid = rng.uniform(0.0, 1.0, (32, 32))
        lo = percentile_oracle(grid, 0.5)
        hi = percentile_oracle(grid, 99.5)
        img = quantize_output(grid, 8, 0.5, 99.5)
        assert (img.values[grid <= lo] == 0).all()
        assert (img.values[grid >= hi] == 255).all()
        inside = (grid > lo) & (grid < hi)
        expected = np.floor((grid[inside] - lo) / (hi - lo) * 255 + 0.5)
        np.testing.assert_array_equal(img.values[inside].astype(float), expected)

    def test_bad_percentiles_rejected(self):
        with pytest.raises(ParamError):
            quantize_output(np.zeros((4, 4)), 8, 60.0, 40.0)


class TestContrastMetrics:
    def test_constant_region_degenerate(self):
        img = LdrImage(np.full((16, 16), 7), 8)
        m = contrast_metrics(img, Roi(0, 0, 16, 16))
        assert m == {"rms_contrast": 0.0, "entropy": 0.0, "dynamic_range": 0.0}

    def test_checkerboard_entropy_one_bit(self):
        yy, xx = np.mgrid[0:16, 0:16]
        img = LdrImage(((yy + xx) % 2) * 255, 8)
        m = contrast_metrics(img, Roi(0, 0, 16, 16))
        assert m["entropy"] == pytest.approx(1.0, abs=1e-12)
        assert m["dynamic_range"] == 255.0

    def test_matches_direct_oracle(self, rng):
        values = rng.integers(0, 256, (24, 24))
        img = LdrImage(values, 8)
        roi = Roi(3, 5, 13, 11)
        got = contrast_metrics(img, roi)
        ys, xs = roi.slices()
        want = region_stats_oracle(values[ys, xs], 255)
        assert got["rms_contrast"] == pytest.approx(want["rms_contrast"], abs=1e-9)
        assert got["entropy"] == pytest.approx(want["entropy"], abs=1e-9)
        assert got["dynamic_range"] == pytest.approx(want["dynamic_range"], abs=0)

    def test_roi_bounds_checked(self):
        img = LdrImage(np.zeros((8, 8)), 8)
        with pytest.raises(ParamError):
            contrast_metrics(img, Roi(4, 4, 8, 8))
        with pytest.raises(ParamError):
            contrast_metrics(img, Roi(0, 0, 0, 3))


class TestCompand:
    def test_constant_slice_gives_midgray(self):
        s = _slice_of(np.full((64, 64), 100.0))
        with pytest.warns(UserWarning, match="degenerate"):
            img = compand(s, CompandParams.defaults(depth=2))
        assert (img.values == 128).all()

    def test_identity_parameters_reduce_to_quantization(self, rng):
        p = CompandParams.defaults(
            depth=3, amp_bone=0.0, amp_soft=0.0, enhance_gain_hi=0.0, enhance_gain_lo=0.0
        )
        for _ in range(3):
            s = HuSlice(rng.uniform(-1024.0, 3071.0, (48, 48)))
            direct = quantize_output(normalize_to_unit(clip_metal(s, p), p), 8)
            piped = compand(s, p)
            diff = piped.values.astype(int) - direct.values.astype(int)
            assert np.abs(diff).max() <= 1

    def test_deterministic(self, phantom_slice):
        p = CompandParams()
        a = compand(phantom_slice, p)
        b = compand(phantom_slice, p)
        np.testing.assert_array_equal(a.values, b.values)

    def test_uses_full_bit_depth_domain(self, phantom_slice):
        img = compand(phantom_slice, CompandParams())
        assert img.values.min() == 0
        assert img.values.max() == 255
        img16 = compand(phantom_slice, CompandParams(), bit_depth=16)
        assert img16.values.min() == 0
        assert img16.values.max() == 65535

    def test_rejects_invalid_params(self, phantom_slice):
        with pytest.raises(ParamError, match="beta"):
            compand(phantom_slice, CompandParams(beta=2.0))

    def test_rejects_tiny_slices(self):
        with pytest.raises(ParamError, match="smaller"):
            compand(_slice_of(np.zeros((8, 8))), CompandParams())

    def test_natural_mode_runs_without_channel_split(self, rng):
        p = CompandParams.defaults(depth=2, mode="natural", hu_min_clip=0.0, hu_max_clip=1.0)
        s = HuSlice(rng.uniform(0.0, 1.0, (32, 32)))
        img = compand(s, p)
        assert img.values.shape == (32, 32)


class TestPhantomImprovement:
    def test_lesion_contrast_beats_both_windows(self, phantom_slice):
        p = CompandParams()
        macc = compand(phantom_slice, p)
        bone = window_render(phantom_slice, WINDOW_PRESETS["bone"])
        soft = window_render(phantom_slice, WINDOW_PRESETS["soft"])
        macc_rms = contrast_metrics(macc, LESION_ROI)["rms_contrast"]
        assert macc_rms > contrast_metrics(bone, LESION_ROI)["rms_contrast"]
        assert macc_rms > contrast_metrics(soft, LESION_ROI)["rms_contrast"]

    def test_tooth_edges_survive_where_soft_window_saturates(self, phantom_slice):
        p = CompandParams()
        macc = compand(phantom_slice, p)
        soft = window_render(phantom_slice, WINDOW_PRESETS["soft"])
        assert mean_gradient(macc.values, TOOTH_ROI) > mean_gradient(soft.values, TOOTH_ROI)


class TestPngIo:
    def test_round_trip_8_bit(self, tmp_path, rng):
        img = LdrImage(rng.integers(0, 256, (16, 16)), 8)
        path = tmp_path / "o.png"
        save_png(img, path)
        back = load_png(path)
        assert back.bit_depth == 8
        np.testing.assert_array_equal(back.values, img.values)

    def test_round_trip_16_bit(self, tmp_path, rng):
        img = LdrImage(rng.integers(0, 65536, (16, 16)), 16)
        path = tmp_path / "o16.png"
        save_png(img, path)
        back = load_png(path)
        assert back.bit_depth == 16
        np.testing.assert_array_equal(back.values, img.values)
