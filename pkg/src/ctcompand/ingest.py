"""Slice ingestion: minimal DICOM reading, a raw-float fixture format, metal clipping.

The DICOM reader deliberately covers only what calibrated single-frame CT
needs: Part-10 files in the implicit or explicit little-endian transfer
syntaxes, grayscale, one frame, with rescale tags present.  Everything else
is refused with a clean error rather than guessed at.  The raw-float format
is the package's own bit-exact container so golden tests and lossless
pipelines never depend on DICOM parsing.

Raw-float layout: 8-byte magic ``CTCOMPND``, width and height as 4-byte
little-endian unsigned integers, then width*height IEEE-754 32-bit
little-endian values in row-major order.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .core import CompandError, CompandParams, HuSlice, ParamError

RAW_FLOAT_MAGIC = b"CTCOMPND"
_MAX_RAW_PIXELS = 1 << 28

_TS_IMPLICIT_LE = "1.2.840.10008.1.2"
_TS_EXPLICIT_LE = "1.2.840.10008.1.2.1"
_TS_EXPLICIT_BE = "1.2.840.10008.1.2.2"
_TS_DEFLATED_LE = "1.2.840.10008.1.2.1.99"

# explicit-VR types carrying a 2-byte reserved field and 4-byte length
_LONG_VRS = {b"OB", b"OW", b"OF", b"OD", b"OL", b"OV", b"SQ", b"UC", b"UR", b"UT", b"UN"}
_UNDEFINED = 0xFFFFFFFF

_TAG_TRANSFER_SYNTAX = (0x0002, 0x0010)
_TAG_SAMPLES_PER_PIXEL = (0x0028, 0x0002)
_TAG_PHOTOMETRIC = (0x0028, 0x0004)
_TAG_NUMBER_OF_FRAMES = (0x0028, 0x0008)
_TAG_ROWS = (0x0028, 0x0010)
_TAG_COLS = (0x0028, 0x0011)
_TAG_PIXEL_SPACING = (0x0028, 0x0030)
_TAG_BITS_ALLOCATED = (0x0028, 0x0100)
_TAG_BITS_STORED = (0x0028, 0x0101)
_TAG_PIXEL_REPRESENTATION = (0x0028, 0x0103)
_TAG_RESCALE_INTERCEPT = (0x0028, 0x1052)
_TAG_RESCALE_SLOPE = (0x0028, 0x1053)
_TAG_PIXEL_DATA = (0x7FE0, 0x0010)

_WANTED_TAGS = {
    _TAG_SAMPLES_PER_PIXEL,
    _TAG_PHOTOMETRIC,
    _TAG_NUMBER_OF_FRAMES,
    _TAG_ROWS,
    _TAG_COLS,
    _TAG_PIXEL_SPACING,
    _TAG_BITS_ALLOCATED,
    _TAG_BITS_STORED,
    _TAG_PIXEL_REPRESENTATION,
    _TAG_RESCALE_INTERCEPT,
    _TAG_RESCALE_SLOPE,
    _TAG_PIXEL_DATA,
}


class FormatError(CompandError):
    """The file is not in a supported format or is structurally broken."""


class MetadataError(CompandError):
    """The file parses but lacks metadata the pipeline needs."""


@dataclass(frozen=True)
class DicomSliceMeta:
    rescale_slope: float
    rescale_intercept: float
    pixel_spacing_mm: tuple[float, float]
    rows: int
    cols: int
    bits_stored: int

    def __post_init__(self):
        if self.rescale_slope == 0:
            raise MetadataError("rescale slope must be nonzero")
        if self.rows <= 0 or self.cols <= 0:
            raise FormatError("image dimensions must be positive")


class _Cursor:
    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError("truncated DICOM element")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def peek_group(self) -> int | None:
        if self.pos + 2 > len(self.data):
            return None
        return struct.unpack_from("<H", self.data, self.pos)[0]

    @property
    def exhausted(self) -> bool:
        return self.pos >= len(self.data)


def _read_element_header(cur: _Cursor, explicit: bool) -> tuple[tuple[int, int], int, bytes]:
    group = cur.u16()
    elem = cur.u16()
    tag = (group, elem)
    if group == 0xFFFE:  # item / delimiter tags never carry a VR
        return tag, cur.u32(), b""
    if explicit:
        vr = cur.take(2)
        if vr in _LONG_VRS:
            cur.take(2)
            length = cur.u32()
        else:
            length = cur.u16()
        return tag, length, vr
    return tag, cur.u32(), b""


def _skip_undefined_sequence(cur: _Cursor, explicit: bool) -> None:
    # consume items until the sequence delimiter
    while True:
        tag, length, _ = _read_element_header(cur, explicit)
        if tag == (0xFFFE, 0xE0DD):
            return
        if tag != (0xFFFE, 0xE000):
            raise FormatError("malformed sequence: expected an item tag")
        if length == _UNDEFINED:
            _skip_undefined_item(cur, explicit)
        else:
            cur.take(length)


def _skip_undefined_item(cur: _Cursor, explicit: bool) -> None:
    # items of undefined length contain ordinary elements up to the delimiter
    while True:
        if cur.peek_group() == 0xFFFE:
            tag, _, _ = _read_element_header(cur, explicit)
            if tag == (0xFFFE, 0xE00D):
                return
            raise FormatError("malformed sequence item")
        _read_one_element(cur, explicit, store=None)


def _read_one_element(cur: _Cursor, explicit: bool, store: dict | None) -> None:
    tag, length, vr = _read_element_header(cur, explicit)
    if length == _UNDEFINED:
        if tag == _TAG_PIXEL_DATA:
            raise FormatError("encapsulated pixel data implies a compressed transfer syntax")
        _skip_undefined_sequence(cur, explicit)
        return
    value = cur.take(length)
    if store is not None and tag in _WANTED_TAGS:
        store[tag] = value


def _ascii(value: bytes) -> str:
    return value.decode("ascii", errors="replace").strip("\x00 ").strip()


def _us(value: bytes, what: str) -> int:
    if len(value) < 2:
        raise FormatError(f"malformed {what} attribute")
    return struct.unpack_from("<H", value, 0)[0]


def _floats(value: bytes, what: str) -> list[float]:
    try:
        return [float(part) for part in _ascii(value).split("\\") if part != ""]
    except ValueError as exc:
        raise MetadataError(f"malformed {what} attribute") from exc


def _parse_meta(cur: _Cursor) -> str:
    transfer_syntax = ""
    while cur.peek_group() == 0x0002:
        tag, length, _ = _read_element_header(cur, explicit=True)
        if length == _UNDEFINED:
            raise FormatError("malformed file meta group")
        value = cur.take(length)
        if tag == _TAG_TRANSFER_SYNTAX:
            transfer_syntax = _ascii(value)
    if not transfer_syntax:
        raise FormatError("file meta group lacks a transfer syntax")
    return transfer_syntax


def read_dicom_meta(elements: dict) -> DicomSliceMeta:
    if _TAG_RESCALE_SLOPE not in elements or _TAG_RESCALE_INTERCEPT not in elements:
        raise MetadataError("missing rescale slope/intercept tags")
    if _TAG_ROWS not in elements or _TAG_COLS not in elements:
        raise FormatError("missing image dimensions")
    slope = _floats(elements[_TAG_RESCALE_SLOPE], "rescale slope")[0]
    intercept = _floats(elements[_TAG_RESCALE_INTERCEPT], "rescale intercept")[0]
    spacing = (1.0, 1.0)
    if _TAG_PIXEL_SPACING in elements:
        parts = _floats(elements[_TAG_PIXEL_SPACING], "pixel spacing")
        if len(parts) >= 2:
            spacing = (parts[0], parts[1])
    bits_stored = _us(elements.get(_TAG_BITS_STORED, b"\x10\x00"), "bits stored")
    return DicomSliceMeta(
        rescale_slope=slope,
        rescale_intercept=intercept,
        pixel_spacing_mm=spacing,
        rows=_us(elements[_TAG_ROWS], "rows"),
        cols=_us(elements[_TAG_COLS], "columns"),
        bits_stored=bits_stored,
    )


def load_dicom_slice(path) -> HuSlice:
    """Read a single-frame grayscale CT slice and convert it to Hounsfield units.

    HU = stored_value * rescale_slope + rescale_intercept, element-wise and
    exact for integer inputs.  Compressed transfer syntaxes, multi-frame
    objects, and color images raise :class:`FormatError`; missing rescale
    tags raise :class:`MetadataError`.
    """
    name = os.fspath(path)
    with open(name, "rb") as fh:
        blob = fh.read()
    if len(blob) < 132 or blob[128:132] != b"DICM":
        raise FormatError("not a DICOM part-10 file")
    cur = _Cursor(blob, 132)
    transfer_syntax = _parse_meta(cur)
    if transfer_syntax == _TS_EXPLICIT_BE:
        raise FormatError("big-endian transfer syntax not supported")
    if transfer_syntax == _TS_DEFLATED_LE:
        raise FormatError("deflated transfer syntax not supported")
    if transfer_syntax not in (_TS_IMPLICIT_LE, _TS_EXPLICIT_LE):
        raise FormatError(f"compressed transfer syntax not supported: {transfer_syntax}")
    explicit = transfer_syntax == _TS_EXPLICIT_LE

    elements: dict = {}
    while not cur.exhausted:
        _read_one_element(cur, explicit, elements)
        if _TAG_PIXEL_DATA in elements:
            break

    if _TAG_NUMBER_OF_FRAMES in elements:
        frames = _ascii(elements[_TAG_NUMBER_OF_FRAMES])
        if frames and int(frames) > 1:
            raise FormatError("multi-frame objects not supported")
    if _TAG_SAMPLES_PER_PIXEL in elements:
        if _us(elements[_TAG_SAMPLES_PER_PIXEL], "samples per pixel") != 1:
            raise FormatError("color images not supported")
    if _TAG_PHOTOMETRIC in elements:
        photometric = _ascii(elements[_TAG_PHOTOMETRIC])
        if photometric not in ("MONOCHROME1", "MONOCHROME2"):
            raise FormatError(f"unsupported photometric interpretation: {photometric}")

    meta = read_dicom_meta(elements)
    if _TAG_PIXEL_DATA not in elements:
        raise FormatError("missing pixel data")
    bits_allocated = _us(elements.get(_TAG_BITS_ALLOCATED, b"\x10\x00"), "bits allocated")
    if bits_allocated not in (8, 16):
        raise FormatError(f"unsupported bits allocated: {bits_allocated}")
    signed = False
    if _TAG_PIXEL_REPRESENTATION in elements:
        signed = _us(elements[_TAG_PIXEL_REPRESENTATION], "pixel representation") == 1
    dtype = {(8, False): "<u1", (8, True): "<i1", (16, False): "<u2", (16, True): "<i2"}[
        (bits_allocated, signed)
    ]
    raw = elements[_TAG_PIXEL_DATA]
    need = meta.rows * meta.cols * (bits_allocated // 8)
    if len(raw) < need:
        raise FormatError("truncated pixel data")
    stored = np.frombuffer(raw[:need], dtype=dtype).reshape(meta.rows, meta.cols)
    hu = stored.astype(np.float64) * meta.rescale_slope + meta.rescale_intercept
    if not np.all(np.isfinite(hu)):
        raise FormatError("non-finite values after rescale")
    return HuSlice(hu, pixel_spacing_mm=meta.pixel_spacing_mm, source_id=os.path.basename(name))


def save_raw_float(path, values: np.ndarray) -> None:
    """Write a 2D grid in the package's bit-exact raw-float container."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("raw-float payload must be a 2D grid")
    h, w = arr.shape
    with open(os.fspath(path), "wb") as fh:
        fh.write(RAW_FLOAT_MAGIC)
        fh.write(struct.pack("<II", w, h))
        fh.write(arr.astype("<f4").tobytes(order="C"))


def load_raw_float(path) -> HuSlice:
    """Read the raw-float container back into a slice with unit pixel spacing."""
    name = os.fspath(path)
    with open(name, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(RAW_FLOAT_MAGIC) + 8:
        raise FormatError("truncated header")
    if blob[: len(RAW_FLOAT_MAGIC)] != RAW_FLOAT_MAGIC:
        raise FormatError("magic-number mismatch")
    w, h = struct.unpack_from("<II", blob, len(RAW_FLOAT_MAGIC))
    if w == 0 or h == 0 or w * h > _MAX_RAW_PIXELS:
        raise FormatError("dimension overflow")
    payload = blob[len(RAW_FLOAT_MAGIC) + 8 :]
    need = 4 * w * h
    if len(payload) < need:
        raise FormatError("truncated payload")
    if len(payload) > need:
        raise FormatError("trailing bytes after payload")
    values = np.frombuffer(payload, dtype="<f4").reshape(h, w).astype(np.float64)
    if not np.all(np.isfinite(values)):
        raise FormatError("non-finite values in payload")
    return HuSlice(values, pixel_spacing_mm=(1.0, 1.0), source_id=os.path.basename(name))


def clip_metal(s: HuSlice, p: CompandParams) -> HuSlice:
    """Clamp values into the configured HU range; metal blooms exceed it."""
    if p.hu_max_clip <= p.hu_min_clip:
        raise ParamError("degenerate clip range: hu_max_clip must exceed hu_min_clip")
    return HuSlice(
        np.clip(s.values, p.hu_min_clip, p.hu_max_clip),
        pixel_spacing_mm=s.pixel_spacing_mm,
        source_id=s.source_id,
    )
