"""Multi-scale contrast-adaptive companding of HDR CT slices.

The library compresses the full Hounsfield range of a CT slice into one
low-dynamic-range display image while adaptively re-expanding local
contrast, with a soft bone/soft-tissue channel split, plus conventional
window-setting baselines for comparison.
"""

from .core import (
    CompandError,
    CompandParams,
    HuSlice,
    LdrImage,
    ParamError,
    Pyramid,
    WindowSpec,
    normalize_to_unit,
    unit_to_hu,
    validate_params,
)
from .enhance import soft_tissue_enhance, surround_signal, weight_field
from .ingest import (
    DicomSliceMeta,
    FormatError,
    MetadataError,
    clip_metal,
    load_dicom_slice,
    load_raw_float,
    save_raw_float,
)
from .modulate import (
    delta_field,
    gamma_field,
    modulate_contrast_pyramid,
    naka_rushton,
    resolve_teeth_level,
    soft_threshold_field,
)
from .pyramid import (
    build_contrast_pyramid,
    build_gaussian_pyramid,
    collapse,
    expand,
    reduce,
)
from .render import (
    WINDOW_PRESETS,
    Roi,
    compand,
    contrast_metrics,
    quantize_output,
    save_png,
    window_render,
)
from .texture import build_sorf_pyramid

__version__ = "0.1.0"

__all__ = [
    "CompandError",
    "CompandParams",
    "DicomSliceMeta",
    "FormatError",
    "HuSlice",
    "LdrImage",
    "MetadataError",
    "ParamError",
    "Pyramid",
    "Roi",
    "WINDOW_PRESETS",
    "WindowSpec",
    "build_contrast_pyramid",
    "build_gaussian_pyramid",
    "build_sorf_pyramid",
    "clip_metal",
    "collapse",
    "compand",
    "contrast_metrics",
    "delta_field",
    "expand",
    "gamma_field",
    "load_dicom_slice",
    "load_raw_float",
    "modulate_contrast_pyramid",
    "naka_rushton",
    "normalize_to_unit",
    "quantize_output",
    "reduce",
    "resolve_teeth_level",
    "save_png",
    "save_raw_float",
    "soft_threshold_field",
    "soft_tissue_enhance",
    "surround_signal",
    "unit_to_hu",
    "validate_params",
    "weight_field",
    "window_render",
]
