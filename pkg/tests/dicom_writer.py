"""Minimal DICOM part-10 writer used as the ingestion test oracle.

Writes just enough of the standard for single-frame grayscale CT: a correct
preamble, file meta group, and an ascending-tag dataset in implicit or
explicit little-endian encoding.  Independent of the reader by construction
(byte packing here, byte scanning there).
"""

from __future__ import annotations

import struct

import numpy as np

TS_IMPLICIT_LE = "1.2.840.10008.1.2"
TS_EXPLICIT_LE = "1.2.840.10008.1.2.1"
TS_EXPLICIT_BE = "1.2.840.10008.1.2.2"
TS_JPEG_BASELINE = "1.2.840.10008.1.2.4.50"

_SHORT_VRS = {b"US", b"DS", b"CS", b"IS", b"UI", b"LO", b"UL"}


def _pad(value: bytes, pad_byte: bytes) -> bytes:
    return value + pad_byte if len(value) % 2 else value


def _element(group: int, elem: int, vr: bytes, value: bytes, explicit: bool) -> bytes:
    head = struct.pack("<HH", group, elem)
    if explicit:
        if vr in _SHORT_VRS:
            return head + vr + struct.pack("<H", len(value)) + value
        return head + vr + b"\x00\x00" + struct.pack("<I", len(value)) + value
    return head + struct.pack("<I", len(value)) + value


def _us(v: int) -> bytes:
    return struct.pack("<H", v)


def _ds(text: str) -> bytes:
    return _pad(text.encode("ascii"), b" ")


def _undefined_sequence(explicit: bool) -> bytes:
    """A referenced-image style sequence of undefined length, with one
    defined-length item, one undefined-length item holding a nested element,
    plus a sibling defined-length sequence; readers must skip it all."""
    inner = _element(0x0008, 0x1150, b"UI", _pad(b"1.2.3", b"\x00"), explicit)
    defined_item = struct.pack("<HHI", 0xFFFE, 0xE000, len(inner)) + inner
    undefined_item = (
        struct.pack("<HHI", 0xFFFE, 0xE000, 0xFFFFFFFF)
        + inner
        + struct.pack("<HHI", 0xFFFE, 0xE00D, 0)
    )
    body = defined_item + undefined_item + struct.pack("<HHI", 0xFFFE, 0xE0DD, 0)
    if explicit:
        sq_undef = struct.pack("<HH", 0x0008, 0x1140) + b"SQ\x00\x00" + struct.pack("<I", 0xFFFFFFFF) + body
    else:
        sq_undef = struct.pack("<HHI", 0x0008, 0x1140, 0xFFFFFFFF) + body
    sq_defined = _element(0x0008, 0x1145, b"SQ", defined_item, explicit)
    return sq_undef + sq_defined


def write_dicom(
    path,
    stored: np.ndarray,
    *,
    slope: float | None = 1.0,
    intercept: float | None = -1024.0,
    spacing: tuple[float, float] | None = (0.5, 0.5),
    explicit: bool = True,
    transfer_syntax: str | None = None,
    samples_per_pixel: int = 1,
    number_of_frames: int | None = None,
    photometric: str = "MONOCHROME2",
    signed: bool | None = None,
    drop_pixel_bytes: int = 0,
    with_sequences: bool = False,
) -> None:
    stored = np.asarray(stored)
    if signed is None:
        signed = stored.dtype.kind == "i"
    dtype = "<i2" if signed else "<u2"
    payload = stored.astype(dtype).tobytes(order="C")
    if drop_pixel_bytes:
        payload = payload[:-drop_pixel_bytes]
    payload = _pad(payload, b"\x00")

    ts = transfer_syntax or (TS_EXPLICIT_LE if explicit else TS_IMPLICIT_LE)
    meta_body = _element(0x0002, 0x0010, b"UI", _pad(ts.encode("ascii"), b"\x00"), True)
    meta = (
        _element(0x0002, 0x0000, b"UL", struct.pack("<I", len(meta_body)), True) + meta_body
    )

    rows, cols = stored.shape
    ds = b""
    if with_sequences:
        ds += _undefined_sequence(explicit)
    ds += _element(0x0028, 0x0002, b"US", _us(samples_per_pixel), explicit)
    ds += _element(0x0028, 0x0004, b"CS", _pad(photometric.encode(), b" "), explicit)
    if number_of_frames is not None:
        ds += _element(0x0028, 0x0008, b"IS", _ds(str(number_of_frames)), explicit)
    ds += _element(0x0028, 0x0010, b"US", _us(rows), explicit)
    ds += _element(0x0028, 0x0011, b"US", _us(cols), explicit)
    if spacing is not None:
        ds += _element(0x0028, 0x0030, b"DS", _ds(f"{spacing[0]}\\{spacing[1]}"), explicit)
    ds += _element(0x0028, 0x0100, b"US", _us(16), explicit)
    ds += _element(0x0028, 0x0101, b"US", _us(16), explicit)
    ds += _element(0x0028, 0x0103, b"US", _us(1 if signed else 0), explicit)
    if intercept is not None:
        ds += _element(0x0028, 0x1052, b"DS", _ds(str(intercept)), explicit)
    if slope is not None:
        ds += _element(0x0028, 0x1053, b"DS", _ds(str(slope)), explicit)
    ds += _element(0x7FE0, 0x0010, b"OW", payload, explicit)

    with open(path, "wb") as fh:
        fh.write(b"\x00" * 128)
        fh.write(b"DICM")
        fh.write(meta)
        fh.write(ds)
