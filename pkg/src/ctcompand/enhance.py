"""Pre-processing: widen the narrow soft-tissue contrast band before companding.

The correction adds a fraction of each pixel's deviation from its Gaussian
surround, weighted by a piecewise parabola of intensity.  Above the turnover
intensity the weight is positive (deviations amplified, peaking at gain_hi);
below it the weight is negative with magnitude up to gain_lo / 3.  Skipped
entirely in natural-image mode.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter

from .core import CompandParams, ParamError


def weight_field(u: np.ndarray, p: CompandParams) -> np.ndarray:
    """Intensity-dependent enhancement weight; zero at the turnover and at 1."""
    v = p.enhance_turnover
    if not 0.0 < v < 1.0:
        raise ParamError("enhance_turnover must lie in (0, 1)")
    u = np.asarray(u, dtype=np.float64)
    above = 4.0 * p.enhance_gain_hi * (u - v) * (1.0 - u) / (1.0 - v) ** 2
    below = -4.0 * p.enhance_gain_lo * (v - u) * u / (3.0 * v * v)
    return np.where(u >= v, above, below)


def surround_signal(u: np.ndarray, p: CompandParams) -> np.ndarray:
    """Center-minus-surround deviation; the surround is a truncated Gaussian blur."""
    if p.srnd_radius < 1:
        raise ParamError("srnd_radius must be >= 1")
    u = np.asarray(u, dtype=np.float64)
    # truncate=2 with sigma = radius/2 gives a kernel of exactly srnd_radius taps per side
    blurred = gaussian_filter(u, sigma=p.srnd_radius / 2.0, mode="mirror", truncate=2.0)
    return u - blurred


def soft_tissue_enhance(u: np.ndarray, p: CompandParams) -> np.ndarray:
    """Add the weighted, normalized local deviation; identity on flat input.

    Normalizing by the largest absolute deviation bounds the correction by
    the weight magnitude regardless of the slice's contrast polarity.
    """
    u = np.asarray(u, dtype=np.float64)
    srnd = surround_signal(u, p)
    peak = np.abs(srnd).max()
    # a flat image leaves only rounding dust in the surround; dividing by it
    # would amplify that dust to order one
    if peak <= 1e-12:
        return u.copy()
    corrected = u + weight_field(u, p) * srnd / peak
    return np.clip(corrected, p.epsilon, 1.0)
