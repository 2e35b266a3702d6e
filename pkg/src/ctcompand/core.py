"""Domain types, tunable parameters, and the shared intensity normalization.

All pipeline stages operate on double-precision grids normalized to
[epsilon, 1]; integer quantization happens only when a display image is
produced.  Every type here is immutable after construction so slices can be
processed concurrently without shared state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

HU_MIN_DEFAULT = -1024.0  # 12-bit CT convention
HU_MAX_DEFAULT = 3071.0
SOFT_LO_DEFAULT = -200.0  # soft-tissue attenuation band
SOFT_HI_DEFAULT = 300.0

# Per-level channel gain profiles for the default pyramid depth of 5.
# Fine scales favor the bone channel (teeth detail), mid scales the soft
# channel (coarse lesion structure).  Other depths interpolate these.
_BONE_GAIN_PROFILE = (1.2, 1.2, 1.0, 0.8, 0.6, 0.5)
_SOFT_GAIN_PROFILE = (0.6, 0.7, 0.8, 0.8, 0.7, 0.6)


class CompandError(Exception):
    """Base class for all errors raised by this package."""


class ParamError(CompandError):
    """A parameter set or argument violates its contract."""


def _as_grid(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D grid, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class HuSlice:
    """A single calibrated CT slice: Hounsfield values plus pixel spacing."""

    values: np.ndarray
    pixel_spacing_mm: tuple[float, float] = (1.0, 1.0)
    source_id: str = ""

    def __post_init__(self):
        grid = _as_grid(self.values)
        if not np.all(np.isfinite(grid)):
            raise ValueError("slice values must be finite")
        object.__setattr__(self, "values", grid)
        rs, cs = self.pixel_spacing_mm
        if rs <= 0 or cs <= 0:
            raise ValueError("pixel spacing must be positive")

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class LdrImage:
    """Quantized display image, 8- or 16-bit grayscale."""

    values: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        if self.bit_depth not in (8, 16):
            raise ValueError("bit_depth must be 8 or 16")
        arr = np.asarray(self.values)
        if arr.ndim != 2:
            raise ValueError("LdrImage needs a 2D grid")
        if arr.min() < 0 or arr.max() > self.max_value:
            raise ValueError("pixel values outside the bit-depth domain")
        dtype = np.uint8 if self.bit_depth == 8 else np.uint16
        object.__setattr__(self, "values", arr.astype(dtype))

    @property
    def max_value(self) -> int:
        return (1 << self.bit_depth) - 1

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class WindowSpec:
    """Conventional window-setting display mapping: center level and width in HU."""

    level: float
    width: float
    name: str = ""

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("window width must be positive")


@dataclass(frozen=True)
class Pyramid:
    """Ordered multi-resolution stack; level 0 is the finest grid."""

    levels: tuple[np.ndarray, ...]

    def __post_init__(self):
        levels = tuple(_as_grid(lv) for lv in self.levels)
        if not levels:
            raise ValueError("pyramid needs at least one level")
        for fine, coarse in zip(levels, levels[1:]):
            if coarse.shape[0] >= fine.shape[0] or coarse.shape[1] >= fine.shape[1]:
                raise ValueError("pyramid level dimensions must strictly decrease")
        object.__setattr__(self, "levels", levels)

    def __len__(self) -> int:
        return len(self.levels)

    def __getitem__(self, idx: int) -> np.ndarray:
        return self.levels[idx]


@dataclass(frozen=True)
class CompandParams:
    """Every free constant of the companding pipeline.

    The response-curve constants are tied together: beta must be 1 and
    r_max must equal (alpha + 1) * (1 - baseline), so that every adaptation
    curve passes through the point (1, 1) where local contrast is neutral.
    """

    hu_min_clip: float = HU_MIN_DEFAULT
    hu_max_clip: float = HU_MAX_DEFAULT
    soft_lo: float = SOFT_LO_DEFAULT
    soft_hi: float = SOFT_HI_DEFAULT

    # pre-processing stage (soft-tissue contrast enhancement)
    enhance_turnover: float = (SOFT_LO_DEFAULT - HU_MIN_DEFAULT) / (HU_MAX_DEFAULT - HU_MIN_DEFAULT)
    enhance_gain_hi: float = 0.1
    enhance_gain_lo: float = 0.05
    srnd_radius: int = 8

    # pyramid structure
    depth: int = 5
    kernel_a: float = 0.4

    # texture-contrast stack
    texture_exponent: float = 0.7
    texture_blend: tuple[float, ...] = (0.5,) * 6

    # adaptation strength and channel separation; the response exponent needs
    # to clear 2 in quiet neighborhoods before weak contrasts gain anything,
    # and max texture scores sit near 0.3, hence amplitudes well above 1
    teeth_level: int | None = None  # None = choose from pixel spacing
    amp_bone: float = 48.0
    amp_soft: float = 48.0
    bone_gains: tuple[float, ...] = _BONE_GAIN_PROFILE
    soft_gains: tuple[float, ...] = _SOFT_GAIN_PROFILE

    # saturating response curve
    alpha: float = 1.0
    beta: float = 1.0
    baseline: float = 0.0
    r_max: float = 2.0

    epsilon: float = 1e-3
    mode: str = "ct"

    @classmethod
    def defaults(cls, depth: int = 5, **overrides) -> "CompandParams":
        """Default parameter set resized for an arbitrary pyramid depth."""
        if depth != 5:
            xs = np.linspace(0.0, 1.0, depth + 1)
            anchor = np.linspace(0.0, 1.0, len(_BONE_GAIN_PROFILE))
            overrides.setdefault("bone_gains", tuple(np.interp(xs, anchor, _BONE_GAIN_PROFILE)))
            overrides.setdefault("soft_gains", tuple(np.interp(xs, anchor, _SOFT_GAIN_PROFILE)))
            overrides.setdefault("texture_blend", (0.5,) * (depth + 1))
        return cls(depth=depth, **overrides)

    def with_(self, **overrides) -> "CompandParams":
        return replace(self, **overrides)


def validate_params(p: CompandParams) -> list[str]:
    """Return every violated invariant of ``p``; an empty list means valid."""
    errors: list[str] = []
    if not math.isfinite(p.hu_min_clip) or not math.isfinite(p.hu_max_clip):
        errors.append("HU clip bounds must be finite")
    elif p.hu_max_clip <= p.hu_min_clip:
        errors.append("degenerate clip range: hu_max_clip must exceed hu_min_clip")
    if not 0.0 < p.enhance_turnover < 1.0:
        errors.append("enhance_turnover must lie in (0, 1)")
    if p.srnd_radius < 1:
        errors.append("srnd_radius must be >= 1")
    if p.depth < 0:
        errors.append("depth must be >= 0")
    if not 0.0 < p.kernel_a < 1.0:
        errors.append("kernel_a must lie in (0, 1)")
    if p.texture_exponent <= 0:
        errors.append("texture_exponent must be positive")
    n_levels = p.depth + 1
    if len(p.texture_blend) != n_levels:
        errors.append(f"texture_blend must have {n_levels} entries (one per level)")
    if any(not 0.0 <= w <= 1.0 for w in p.texture_blend):
        errors.append("texture_blend entries must lie in [0, 1]")
    if p.teeth_level is not None:
        if p.teeth_level < 0:
            errors.append("teeth level must be >= 0")
        elif p.teeth_level > p.depth:
            errors.append("teeth level exceeds pyramid depth")
    if p.amp_bone < 0:
        errors.append("amp_bone must be >= 0")
    if p.amp_soft < 0:
        errors.append("amp_soft must be >= 0")
    for name, gains in (("bone_gains", p.bone_gains), ("soft_gains", p.soft_gains)):
        if len(gains) != n_levels:
            errors.append(f"{name} must have {n_levels} entries (one per level)")
        if any(g < 0 for g in gains):
            errors.append(f"{name} entries must be >= 0")
    if p.beta != 1.0:
        errors.append("beta must be 1")
    expected_rmax = (p.alpha + 1.0) * (1.0 - p.baseline)
    if abs(p.r_max - expected_rmax) > 1e-12:
        errors.append("r_max must equal (alpha + 1) * (1 - baseline)")
    if p.alpha <= 0:
        errors.append("alpha must be positive")
    if not 0.0 < p.epsilon < 1.0:
        errors.append("epsilon must lie in (0, 1)")
    if p.mode not in ("ct", "natural"):
        errors.append("mode must be 'ct' or 'natural'")
    return errors


def require_valid(p: CompandParams) -> None:
    errors = validate_params(p)
    if errors:
        raise ParamError("; ".join(errors))


def hu_to_unit(hu, p: CompandParams):
    """Affine map from Hounsfield units onto the [epsilon, 1] working scale."""
    span = p.hu_max_clip - p.hu_min_clip
    if span <= 0:
        raise ParamError("degenerate clip range: hu_max_clip must exceed hu_min_clip")
    u = (np.asarray(hu, dtype=np.float64) - p.hu_min_clip) / span
    return np.clip(u, p.epsilon, 1.0)


def unit_to_hu(u, p: CompandParams):
    """Inverse of :func:`hu_to_unit`; exact for values above the epsilon floor."""
    return p.hu_min_clip + np.asarray(u, dtype=np.float64) * (p.hu_max_clip - p.hu_min_clip)


def normalize_to_unit(s: HuSlice, p: CompandParams) -> np.ndarray:
    """Normalize a clipped slice onto [epsilon, 1] for the pyramid stages.

    The floor keeps the contrast division (a ratio of local intensities)
    positive and bounded even at air values.
    """
    return hu_to_unit(s.values, p)


def param_field_names() -> tuple[str, ...]:
    return tuple(f.name for f in fields(CompandParams))
