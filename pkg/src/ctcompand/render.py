"""Display rendering: the full companding pipeline, window baselines, metrics.

Window rendering is the conventional clinical mapping (clamp a level/width
band onto the gray scale).  The companding pipeline compresses the whole HU
range into one image while adaptively re-expanding local contrast, so both
bone and soft-tissue structure survive in a single rendering.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .core import (
    CompandParams,
    HuSlice,
    LdrImage,
    ParamError,
    WindowSpec,
    normalize_to_unit,
    require_valid,
)
from .enhance import soft_tissue_enhance
from .ingest import clip_metal
from .modulate import modulate_contrast_pyramid, resolve_teeth_level
from .pyramid import build_contrast_pyramid, build_gaussian_pyramid, collapse
from .texture import build_sorf_pyramid

MIN_SLICE_DIM = 16

WINDOW_PRESETS = {
    "bone": WindowSpec(level=400.0, width=1800.0, name="bone"),
    "soft": WindowSpec(level=50.0, width=400.0, name="soft"),
    "lung": WindowSpec(level=-600.0, width=1500.0, name="lung"),
}


@dataclass(frozen=True)
class Roi:
    """Axis-aligned rectangle: x/y is the top-left corner in pixel units."""

    x: int
    y: int
    w: int
    h: int
    name: str = ""

    def slices(self) -> tuple[slice, slice]:
        return slice(self.y, self.y + self.h), slice(self.x, self.x + self.w)


def _quantize_unit(unit: np.ndarray, bit_depth: int) -> np.ndarray:
    max_value = (1 << bit_depth) - 1
    # round half away from zero, deterministically
    return np.floor(unit * max_value + 0.5).astype(np.uint8 if bit_depth == 8 else np.uint16)


def window_render(s: HuSlice, w: WindowSpec, bit_depth: int = 8) -> LdrImage:
    """Clamp the HU band [level - width/2, level + width/2] onto the gray scale."""
    if w.width <= 0:
        raise ParamError("window width must be positive")
    lo = w.level - w.width / 2.0
    unit = np.clip((s.values - lo) / w.width, 0.0, 1.0)
    return LdrImage(_quantize_unit(unit, bit_depth), bit_depth)


def quantize_output(
    u_hat: np.ndarray, bit_depth: int = 8, lo_pct: float = 0.5, hi_pct: float = 99.5
) -> LdrImage:
    """Robust percentile stretch of a real-valued grid into the display range.

    Pixels below the low percentile clamp to 0, above the high percentile to
    the maximum code; a degenerate (constant) grid maps to mid-gray with a
    warning.
    """
    if not 0.0 <= lo_pct < hi_pct <= 100.0:
        raise ParamError("percentiles must satisfy 0 <= lo < hi <= 100")
    u_hat = np.asarray(u_hat, dtype=np.float64)
    lo = np.percentile(u_hat, lo_pct)
    hi = np.percentile(u_hat, hi_pct)
    if hi <= lo:
        warnings.warn("degenerate image: constant output, emitting mid-gray")
        mid = 1 << (bit_depth - 1)
        values = np.full(u_hat.shape, mid, dtype=np.uint8 if bit_depth == 8 else np.uint16)
        return LdrImage(values, bit_depth)
    unit = np.clip((u_hat - lo) / (hi - lo), 0.0, 1.0)
    return LdrImage(_quantize_unit(unit, bit_depth), bit_depth)


def contrast_metrics(img: LdrImage, roi: Roi) -> dict[str, float]:
    """Quantitative stand-ins for visual inspection of a region.

    Returns rms_contrast (std/mean), entropy (bits, 256-bin histogram over
    the full code range), and dynamic_range (max - min).  These are desk
    metrics, not clinical measures.
    """
    if roi.w <= 0 or roi.h <= 0:
        raise ParamError("empty ROI")
    if roi.x < 0 or roi.y < 0 or roi.x + roi.w > img.width or roi.y + roi.h > img.height:
        raise ParamError(f"ROI {roi.name or '(unnamed)'} out of image bounds")
    ys, xs = roi.slices()
    region = img.values[ys, xs].astype(np.float64)
    mean = region.mean()
    rms = float(region.std() / mean) if mean > 0 else 0.0
    hist, _ = np.histogram(region, bins=256, range=(0, img.max_value + 1))
    probs = hist[hist > 0] / region.size
    entropy = max(0.0, float(-(probs * np.log2(probs)).sum()))
    return {
        "rms_contrast": rms,
        "entropy": entropy,
        "dynamic_range": float(region.max() - region.min()),
    }


def compand(
    s: HuSlice,
    p: CompandParams,
    bit_depth: int = 8,
    lo_pct: float = 0.5,
    hi_pct: float = 99.5,
) -> LdrImage:
    """Run the full companding pipeline on one slice.

    Stages: metal clip, normalization to [epsilon, 1], soft-tissue
    enhancement (ct mode only), Gaussian + contrast + texture pyramids,
    adaptive response per level, collapse, percentile quantization.
    Deterministic: identical inputs and parameters give identical images.
    """
    require_valid(p)
    if s.width < MIN_SLICE_DIM or s.height < MIN_SLICE_DIM:
        raise ParamError(f"slice smaller than {MIN_SLICE_DIM}x{MIN_SLICE_DIM}")
    clipped = clip_metal(s, p)
    unit = normalize_to_unit(clipped, p)
    if p.mode == "ct":
        unit = soft_tissue_enhance(unit, p)
    gauss = build_gaussian_pyramid(unit, p.depth, p.kernel_a)
    contrast = build_contrast_pyramid(gauss, p.epsilon, p.kernel_a)
    sorf = build_sorf_pyramid(gauss, p)
    teeth = resolve_teeth_level(p, s.pixel_spacing_mm)
    modulated = modulate_contrast_pyramid(contrast, sorf, gauss, p, teeth)
    restored = collapse(modulated, gauss, p.kernel_a)
    return quantize_output(restored, bit_depth, lo_pct, hi_pct)


def save_png(img: LdrImage, path) -> None:
    """Write a non-interlaced grayscale PNG (8- or 16-bit per the image)."""
    Image.fromarray(img.values).save(os.fspath(path), format="PNG")


def load_png(path) -> LdrImage:
    pil = Image.open(os.fspath(path))
    arr = np.asarray(pil)
    if arr.ndim != 2:
        raise ParamError("expected a grayscale PNG")
    # some Pillow versions hand 16-bit grayscale back as int32 (mode "I")
    deep = arr.dtype == np.uint16 or (arr.dtype.kind == "i" and arr.max() > 255)
    return LdrImage(arr.astype(np.uint16 if deep else np.uint8), 16 if deep else 8)
