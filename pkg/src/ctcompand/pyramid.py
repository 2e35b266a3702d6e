"""Gaussian pyramid reduce/expand, ratio-contrast stack, and collapse.

The decomposition uses the classic separable 5-tap generating kernel
[1/4 - a/2, 1/4, a, 1/4, 1/4 - a/2].  Borders are mirror-extended (reflection
about the edge sample, no repeat); on zero-interleaved grids this reflection
preserves the even/odd sample parity, which is what makes expand reproduce
constants exactly at the borders.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import correlate1d

from .core import ParamError, Pyramid


def generating_kernel(a: float = 0.4) -> np.ndarray:
    if not 0.0 < a < 1.0:
        raise ParamError("kernel_a must lie in (0, 1)")
    return np.array([0.25 - a / 2.0, 0.25, a, 0.25, 0.25 - a / 2.0])


def _separable(grid: np.ndarray, kern: np.ndarray) -> np.ndarray:
    out = correlate1d(grid, kern, axis=0, mode="mirror")
    return correlate1d(out, kern, axis=1, mode="mirror")


def reduce(level: np.ndarray, kernel_a: float = 0.4) -> np.ndarray:
    """Low-pass with the generating kernel, then keep every second sample.

    Odd dimensions yield ceil(d/2) outputs.
    """
    level = np.asarray(level, dtype=np.float64)
    if level.ndim != 2 or level.shape[0] < 2 or level.shape[1] < 2:
        raise ValueError("reduce needs a grid of at least 2x2")
    blurred = _separable(level, generating_kernel(kernel_a))
    return blurred[::2, ::2]


def expand(level: np.ndarray, target_shape: tuple[int, int], kernel_a: float = 0.4) -> np.ndarray:
    """Zero-interleave up to ``target_shape`` and interpolate with the kernel.

    The kernel is applied scaled by 2 per axis (4 total), so even and odd
    output phases both receive unit weight and constants are preserved.
    ``target_shape`` must be (2d, ...) or (2d - 1, ...) of the input dims.
    """
    level = np.asarray(level, dtype=np.float64)
    if level.ndim != 2:
        raise ValueError("expand needs a 2D grid")
    th, tw = target_shape
    for t, d in ((th, level.shape[0]), (tw, level.shape[1])):
        if t not in (2 * d, 2 * d - 1):
            raise ValueError(
                f"target dimension {t} incompatible with source dimension {d}"
            )
    interleaved = np.zeros((th, tw), dtype=np.float64)
    interleaved[::2, ::2] = level
    return _separable(interleaved, 2.0 * generating_kernel(kernel_a))


def _level_shapes(shape: tuple[int, int], depth: int) -> list[tuple[int, int]]:
    shapes = [shape]
    for _ in range(depth + 1):
        h, w = shapes[-1]
        shapes.append(((h + 1) // 2, (w + 1) // 2))
    return shapes


def build_gaussian_pyramid(image: np.ndarray, depth: int, kernel_a: float = 0.4) -> Pyramid:
    """Repeatedly reduce ``image``; returns levels 0..depth+1, level 0 = input.

    The extra level beyond ``depth`` seeds the collapse.
    """
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise ValueError("pyramid input must be a 2D grid")
    if depth < 0:
        raise ParamError("depth must be >= 0")
    shapes = _level_shapes(image.shape, depth)
    if min(shapes[depth + 1]) < 2:
        raise ParamError(
            f"depth {depth} too deep for a {image.shape[0]}x{image.shape[1]} image"
        )
    levels = [image]
    for _ in range(depth + 1):
        levels.append(reduce(levels[-1], kernel_a))
    return Pyramid(tuple(levels))


def build_contrast_pyramid(gauss: Pyramid, epsilon: float = 1e-3, kernel_a: float = 0.4) -> Pyramid:
    """Ratio of each level to the expanded next-coarser level, levels 0..depth.

    The epsilon guard only matters for inputs at the normalization floor;
    above it the division is exact and the stack reconstructs the input.
    """
    if len(gauss) < 2:
        raise ValueError("need at least two Gaussian levels")
    levels = []
    for n in range(len(gauss) - 1):
        surround = expand(gauss[n + 1], gauss[n].shape, kernel_a)
        levels.append(gauss[n] / np.maximum(surround, epsilon))
    return Pyramid(tuple(levels))


def collapse(modulated: Pyramid, gauss: Pyramid, kernel_a: float = 0.4) -> np.ndarray:
    """Invert the contrast decomposition from the coarse seed back to level 0.

    The seed is the coarsest Gaussian level, copied unmodulated; each finer
    level multiplies the expanded running reconstruction by its (possibly
    modulated) contrast grid.
    """
    if len(gauss) != len(modulated) + 1:
        raise ValueError("pyramid depth mismatch between contrast and Gaussian stacks")
    recon = gauss[len(gauss) - 1]
    for n in range(len(modulated) - 1, -1, -1):
        if modulated[n].shape != gauss[n].shape:
            raise ValueError("pyramid depth mismatch: level shapes disagree")
        recon = modulated[n] * expand(recon, gauss[n].shape, kernel_a)
    return recon
