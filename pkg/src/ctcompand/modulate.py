"""Per-pixel adaptation exponents and the saturating contrast response.

The adaptation exponent of a pixel grows with the gap between the level's
strongest texture and the local texture, so smooth neighborhoods receive
steep response curves (weak contrasts amplified) while busy neighborhoods
are left nearly untouched.  A soft threshold on intensity at one chosen
coarse level splits the exponent's strength between a bright-structure
(bone) channel and a dark-structure (soft tissue) channel without any
segmentation.
"""

from __future__ import annotations

import math

import numpy as np

from .core import CompandParams, ParamError, Pyramid
from .pyramid import expand, reduce

TOOTH_SCALE_MM = 10.0

# exp(709) is the float64 ceiling; clamping the exponent keeps the response
# finite and equal to its mathematical limit (baseline) for extreme inputs
_EXP_CLAMP = 700.0


def resolve_teeth_level(p: CompandParams, pixel_spacing_mm: tuple[float, float]) -> int:
    """Pick the pyramid level whose receptive field best matches tooth size.

    An explicitly configured level wins; otherwise the level is derived from
    the pixel spacing and clamped into the available range.
    """
    if p.teeth_level is not None:
        return min(max(p.teeth_level, 0), p.depth)
    spacing = (pixel_spacing_mm[0] + pixel_spacing_mm[1]) / 2.0
    level = round(math.log2(TOOTH_SCALE_MM / spacing))
    return min(max(level, 0), p.depth)


def soft_threshold_field(
    gauss: Pyramid, p: CompandParams, teeth_level: int | None = None
) -> list[np.ndarray]:
    """Soft bone/soft-tissue separator, resized to every contrast level.

    Evaluated as exp(-intensity / max intensity) at the chosen coarse level:
    close to 1 over dark (soft) structures, e^-1 at the brightest (bone)
    structures.  The field is carried to finer levels by repeated expansion
    and to coarser ones by repeated reduction so each level gets an aligned
    grid.
    """
    n_levels = len(gauss) - 1
    m = teeth_level if teeth_level is not None else p.teeth_level
    if m is None:
        raise ParamError("teeth level unresolved; pass one or set it in the params")
    if not 0 <= m <= n_levels - 1:
        raise ParamError("teeth level exceeds pyramid depth")
    peak = gauss[m].max()
    if peak <= 0:
        raise ValueError("degenerate level: nonpositive maximum intensity")
    fields: dict[int, np.ndarray] = {m: np.exp(-gauss[m] / peak)}
    for n in range(m - 1, -1, -1):
        fields[n] = expand(fields[n + 1], gauss[n].shape, p.kernel_a)
    for n in range(m + 1, n_levels):
        fields[n] = reduce(fields[n - 1], p.kernel_a)
    return [fields[n] for n in range(n_levels)]


def delta_field(st: np.ndarray, level: int, p: CompandParams) -> np.ndarray:
    """Blend the two channels' per-level gains by the soft threshold.

    The complementary weights make the separation probabilistic: both
    channels always contribute, one of them dominating.
    """
    bone = p.amp_bone * (1.0 - st) * p.bone_gains[level]
    soft = p.amp_soft * st * p.soft_gains[level]
    return bone + soft


def gamma_field(sorf_level: np.ndarray, delta) -> np.ndarray:
    """Adaptation exponent: strength times the headroom below the level's peak texture."""
    return np.asarray(delta) * (sorf_level.max() - sorf_level)


def naka_rushton(contrast: np.ndarray, gamma, p: CompandParams) -> np.ndarray:
    """Saturating response applied to a ratio-contrast grid.

    With beta pinned to 1 the curve is r_max / (alpha + C^-gamma) + baseline;
    the parameter constraint makes every curve pass through (1, 1), and a
    zero exponent collapses the curve to the constant 1.
    """
    contrast = np.asarray(contrast, dtype=np.float64)
    log_c = np.log(np.maximum(contrast, np.finfo(np.float64).tiny))
    t = np.exp(np.clip(-np.asarray(gamma) * log_c, -_EXP_CLAMP, _EXP_CLAMP))
    return p.r_max / (p.alpha + t) + p.baseline


def modulate_contrast_pyramid(
    contrast: Pyramid,
    sorf: Pyramid,
    gauss: Pyramid,
    p: CompandParams,
    teeth_level: int | None = None,
) -> Pyramid:
    """Apply the adaptive response to every contrast level.

    In ct mode the exponent strength comes from the channel blend; natural
    mode uses the single bone-channel constant per level.  A level whose
    exponent field is identically zero carries no modulation and passes
    through unchanged, so disabled adaptation (zero channel amplitudes)
    leaves the decompose/reconstruct round trip intact instead of flattening
    the image.
    """
    n_levels = len(contrast)
    if len(sorf) != n_levels or len(gauss) != n_levels + 1:
        raise ValueError("pyramid depth mismatch")
    if p.mode == "ct":
        st_fields = soft_threshold_field(gauss, p, teeth_level)
    out: list[np.ndarray] = []
    for n in range(n_levels):
        if p.mode == "ct":
            delta = delta_field(st_fields[n], n, p)
        else:
            delta = p.amp_bone * p.bone_gains[n]
        gam = gamma_field(sorf[n], delta)
        if np.any(gam):
            out.append(naka_rushton(contrast[n], gam, p))
        else:
            out.append(contrast[n].copy())
    return Pyramid(tuple(out))
