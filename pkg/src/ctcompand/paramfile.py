"""Flat key = value parameter files and the ROI list format.

Both formats are hand-editable text: ``#`` starts a comment, arrays are
comma-separated, and a parameter file must spell out every key so a file
fully determines a run.  The parameter hash identifies a configuration in
reports; it changes iff any value changes.
"""

from __future__ import annotations

import hashlib

from .core import CompandParams, ParamError, param_field_names
from .render import Roi

_FLOAT_FIELDS = {
    "hu_min_clip", "hu_max_clip", "soft_lo", "soft_hi",
    "enhance_turnover", "enhance_gain_hi", "enhance_gain_lo",
    "kernel_a", "texture_exponent", "amp_bone", "amp_soft",
    "alpha", "beta", "baseline", "r_max", "epsilon",
}
_INT_FIELDS = {"srnd_radius", "depth"}
_TUPLE_FIELDS = {"texture_blend", "bone_gains", "soft_gains"}

_FIELD_COMMENTS = {
    "hu_min_clip": "HU range kept after metal clipping (12-bit CT convention)",
    "soft_lo": "soft-tissue attenuation band in HU",
    "enhance_turnover": "pre-enhancement turnover on the normalized [0,1] scale; "
    "weights are positive above it, negative below",
    "enhance_gain_hi": "pre-enhancement amplitudes above/below the turnover",
    "srnd_radius": "pixel radius of the surround used by the pre-enhancement",
    "depth": "coarsest contrast level; the Gaussian stack holds depth+2 levels",
    "kernel_a": "center weight of the 5-tap pyramid generating kernel",
    "texture_exponent": "power applied to center-surround magnitudes "
    "(sub-linear emphasizes weak textures)",
    "texture_blend": "per-level blend between own-scale and coarser texture",
    "teeth_level": "pyramid level sampled for the bone/soft split; "
    "'auto' derives it from pixel spacing",
    "amp_bone": "channel amplitudes scaling the adaptation exponent",
    "bone_gains": "per-level gains of the bright-structure channel",
    "soft_gains": "per-level gains of the soft-tissue channel",
    "alpha": "response curve constants; beta is pinned to 1 and "
    "r_max to (alpha+1)*(1-baseline) so curves meet at (1,1)",
    "epsilon": "positivity floor of the normalized intensity scale",
    "mode": "ct or natural (natural skips pre-enhancement and the channel split)",
}


def _format_value(name: str, value) -> str:
    if name in _TUPLE_FIELDS:
        return ", ".join(repr(float(v)) for v in value)
    if name == "teeth_level":
        return "auto" if value is None else str(value)
    if name in _INT_FIELDS:
        return str(int(value))
    if name in _FLOAT_FIELDS:
        return repr(float(value))
    return str(value)


def dump_params(p: CompandParams) -> str:
    lines = ["# ct-compand parameter file", "# arrays are comma-separated, one entry per pyramid level", ""]
    for name in param_field_names():
        comment = _FIELD_COMMENTS.get(name)
        if comment:
            lines.append(f"# {comment}")
        lines.append(f"{name} = {_format_value(name, getattr(p, name))}")
    lines.append("")
    return "\n".join(lines)


def _parse_value(name: str, raw: str, lineno: int):
    try:
        if name in _TUPLE_FIELDS:
            return tuple(float(part) for part in raw.split(","))
        if name == "teeth_level":
            return None if raw == "auto" else int(raw)
        if name in _INT_FIELDS:
            return int(raw)
        if name in _FLOAT_FIELDS:
            return float(raw)
        if name == "mode":
            return raw
    except ValueError as exc:
        raise ParamError(f"line {lineno}: bad value for {name}: {raw!r}") from exc
    raise ParamError(f"line {lineno}: unknown key {name!r}")


def parse_params(text: str) -> CompandParams:
    """Parse a complete parameter file; every key must be present exactly once."""
    known = set(param_field_names())
    seen: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ParamError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in known:
            raise ParamError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ParamError(f"line {lineno}: duplicate key {key!r}")
        seen[key] = _parse_value(key, raw, lineno)
    missing = [name for name in param_field_names() if name not in seen]
    if missing:
        raise ParamError("missing keys: " + ", ".join(missing))
    return CompandParams(**seen)


def params_hash(p: CompandParams) -> str:
    """Stable 16-hex-digit digest of the full parameter set."""
    canonical = "\n".join(
        f"{name}={_format_value(name, getattr(p, name))}" for name in param_field_names()
    )
    return hashlib.sha256(canonical.encode("ascii")).hexdigest()[:16]


def parse_roi_file(text: str) -> list[Roi]:
    """Parse ``name x y w h`` lines into ROIs; comments and blanks are skipped."""
    rois: list[Roi] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        parts = stripped.split()
        if len(parts) != 5:
            raise ParamError(f"line {lineno}: expected 'name x y w h'")
        name = parts[0]
        try:
            x, y, w, h = (int(part) for part in parts[1:])
        except ValueError as exc:
            raise ParamError(f"line {lineno}: ROI coordinates must be integers") from exc
        rois.append(Roi(x=x, y=y, w=w, h=h, name=name))
    return rois
