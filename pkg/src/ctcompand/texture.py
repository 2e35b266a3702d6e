"""Texture-contrast stack: multi-scale context that drives adaptation strength.

Each level blends the magnitude of its own center-surround difference
(raised to a sub-linear power so weak textures still register) with the
expanded texture of the next coarser level.  Flat regions score zero,
busy regions score high; the modulation stage turns low scores into high
adaptation gain.
"""

from __future__ import annotations

import numpy as np

from .core import CompandParams, Pyramid
from .pyramid import expand


def build_sorf_pyramid(gauss: Pyramid, p: CompandParams) -> Pyramid:
    """Second-order texture measure for levels 0..depth of ``gauss``.

    ``gauss`` must carry depth+2 levels; the coarsest texture level is the
    bare center-surround magnitude, finer levels apply the per-level blend
    weights.
    """
    n_levels = len(gauss) - 1
    if len(p.texture_blend) < n_levels:
        raise ValueError("texture_blend shorter than the pyramid")
    mu = p.texture_exponent

    def dog_mag(n: int) -> np.ndarray:
        surround = expand(gauss[n + 1], gauss[n].shape, p.kernel_a)
        return np.abs(gauss[n] - surround) ** mu

    levels: list[np.ndarray] = [None] * n_levels
    levels[n_levels - 1] = dog_mag(n_levels - 1)
    for n in range(n_levels - 2, -1, -1):
        w = p.texture_blend[n]
        coarser = expand(levels[n + 1], gauss[n].shape, p.kernel_a)
        levels[n] = w * dog_mag(n) + (1.0 - w) * coarser
    return Pyramid(tuple(levels))
