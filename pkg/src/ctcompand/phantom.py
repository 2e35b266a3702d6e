"""Synthetic mandible phantom for tests and demos.

A 256x256 axial-style slice with the structures the companding pipeline has
to reconcile: an air background, a soft-tissue head oval, a horseshoe of
cortical bone enclosing marrow, a row of small bright teeth (one carrying a
metal filling above the clip ceiling), and a low-contrast lesion inside the
soft tissue.  Geometry and noise are fully seeded so rendered outputs and
metric thresholds are reproducible.
"""

from __future__ import annotations

import numpy as np

from .core import HuSlice
from .render import Roi

PHANTOM_SIZE = 256
PHANTOM_SEED = 20124
PIXEL_SPACING_MM = (0.5, 0.5)

AIR_HU = -1000.0
SOFT_HU = 40.0
CORTICAL_HU = 1150.0
MARROW_HU = 260.0
TOOTH_HU = 2100.0
METAL_HU = 3600.0
LESION_HU = 90.0
NOISE_HU = 6.0

_CENTER = PHANTOM_SIZE // 2
_JAW_CENTER_Y = 140
_JAW_R_INNER = 54.0
_JAW_R_OUTER = 68.0
_MARROW_R_INNER = 58.0
_MARROW_R_OUTER = 64.0
# teeth are rooted in the marrow band so that, in a soft-tissue window, both
# sides of a tooth edge saturate and the edge disappears
_TOOTH_RING_R = 61.0
_TOOTH_RADIUS = 4.5
_TOOTH_ANGLES_DEG = (20, 45, 70, 90, 110, 135, 160)
_LESION_CENTER = (80, 92)  # (x, y)
_LESION_RADIUS = 12.0

# committed measurement regions, aligned with the geometry above; the lesion
# box keeps clear of the bone shell so its statistics stay soft-tissue only,
# and the tooth box stays inside the bone complex so a saturated window
# really does flatten it
LESION_ROI = Roi(x=64, y=76, w=34, h=34, name="lesion")
TOOTH_ROI = Roi(x=122, y=195, w=13, h=13, name="tooth")


def mandible_phantom(noise_hu: float = NOISE_HU, seed: int = PHANTOM_SEED) -> HuSlice:
    """Build the committed phantom slice; same seed, same slice, bit for bit."""
    n = PHANTOM_SIZE
    yy, xx = np.mgrid[0:n, 0:n].astype(np.float64)
    hu = np.full((n, n), AIR_HU)

    # head oval of soft tissue with a gentle attenuation drift
    body = ((xx - _CENTER) / 92.0) ** 2 + ((yy - _CENTER) / 104.0) ** 2 <= 1.0
    drift = 12.0 * np.cos(2.0 * np.pi * xx / n * 1.5) * np.cos(2.0 * np.pi * yy / n * 1.2)
    hu[body] = SOFT_HU + drift[body]

    # mandibular horseshoe: cortical shell around a marrow band
    jaw_r = np.hypot(xx - _CENTER, yy - _JAW_CENTER_Y)
    lower = yy >= _JAW_CENTER_Y - 20
    shell = (jaw_r >= _JAW_R_INNER) & (jaw_r <= _JAW_R_OUTER) & lower & body
    marrow = (jaw_r > _MARROW_R_INNER) & (jaw_r < _MARROW_R_OUTER) & lower & body
    hu[shell] = CORTICAL_HU
    hu[marrow] = MARROW_HU

    # teeth along the inner arc; one gets a metal filling above the clip range
    for i, angle in enumerate(_TOOTH_ANGLES_DEG):
        theta = np.deg2rad(angle)
        cx = _CENTER + _TOOTH_RING_R * np.cos(theta)
        cy = _JAW_CENTER_Y + _TOOTH_RING_R * np.sin(theta)
        tooth = np.hypot(xx - cx, yy - cy) <= _TOOTH_RADIUS
        hu[tooth] = TOOTH_HU
        if i == 1:
            filling = np.hypot(xx - cx, yy - cy) <= 1.5
            hu[filling] = METAL_HU

    # low-contrast lesion in the soft tissue, clear of the bone
    lx, ly = _LESION_CENTER
    lesion = np.hypot(xx - lx, yy - ly) <= _LESION_RADIUS
    hu[lesion] = LESION_HU + drift[lesion]

    rng = np.random.default_rng(seed)
    hu = hu + rng.normal(0.0, noise_hu, hu.shape)
    return HuSlice(hu, pixel_spacing_mm=PIXEL_SPACING_MM, source_id="mandible-phantom")
